use serde::Serialize;

use super::AnalyzerError;

/// Shift-aware RMSE.
///
/// Sign convention: a positive `shift` moves `b` forward, so sample `a[t]`
/// is compared with `b[t + shift]`. A negative shift therefore compares the
/// current sample of `a` with an earlier sample of `b`: with `a` the
/// emulated trace and `b` the simulated trace, `shift = -1` lines the
/// hardware up with the software result it is actually operating on.
///
/// `rmse_shift(a, b, s) == rmse_shift(b, a, -s)`.
pub fn rmse_shift(a: &[f64], b: &[f64], shift: i64) -> Result<f64, AnalyzerError> {
    if a.len() != b.len() {
        return Err(AnalyzerError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len() as i64;
    let overlap = n - shift.abs();
    if overlap < 2 {
        return Err(AnalyzerError::InsufficientData(format!(
            "overlap of {} points after shift {shift}; need at least 2",
            overlap.max(0)
        )));
    }
    let (start, end) = if shift >= 0 { (0, n - shift) } else { (-shift, n) };
    let mut sum = 0.0;
    for t in start..end {
        let d = a[t as usize] - b[(t + shift) as usize];
        sum += d * d;
    }
    Ok((sum / overlap as f64).sqrt())
}

/// Shift in `range` minimizing [`rmse_shift`]; ties go to the smallest |shift|.
pub fn best_shift(a: &[f64], b: &[f64], range: std::ops::RangeInclusive<i64>) -> Result<(i64, f64), AnalyzerError> {
    let mut best: Option<(i64, f64)> = None;
    for s in range {
        let r = rmse_shift(a, b, s)?;
        let better = match best {
            None => true,
            Some((bs, br)) => r < br || (r == br && s.abs() < bs.abs()),
        };
        if better {
            best = Some((s, r));
        }
    }
    best.ok_or_else(|| AnalyzerError::InsufficientData("empty shift range".into()))
}

/// Samples in the steadiness lead window before the event.
pub const LEAD_WINDOW: usize = 10;
/// Lead-window standard deviation limit, as a fraction of the change.
pub const STEADY_FRACTION: f64 = 0.01;
/// Fraction of the final change that defines the time constant.
pub const TAU_FRACTION: f64 = 0.632;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepResponse {
    pub response_time_s: f64,
    pub y0: f64,
    pub y_final: f64,
    pub threshold: f64,
}

/// Time from `event_step` until the series first reaches 63.2 % of its
/// final change, linearly interpolated between samples.
///
/// `y0` is the mean of the [`LEAD_WINDOW`] samples before the event and
/// `y_final` the mean of the last `final_window` samples. Affine maps of
/// the values leave the result unchanged.
pub fn response_time(
    series: &[f64],
    event_step: usize,
    final_window: usize,
    step_size_s: f64,
) -> Result<StepResponse, AnalyzerError> {
    if event_step < LEAD_WINDOW || event_step >= series.len() {
        return Err(AnalyzerError::InsufficientData(format!(
            "event at sample {event_step} needs {LEAD_WINDOW} lead samples inside a series of {}",
            series.len()
        )));
    }
    if final_window == 0 || final_window > series.len() - event_step {
        return Err(AnalyzerError::InsufficientData(format!(
            "final window of {final_window} samples does not fit after the event"
        )));
    }
    let lead = &series[event_step - LEAD_WINDOW..event_step];
    let y0 = mean(lead);
    let y_final = mean(&series[series.len() - final_window..]);
    let change = y_final - y0;
    let scale = y0.abs().max(y_final.abs()).max(1.0);
    if change.abs() <= 1e-12 * scale {
        return Err(AnalyzerError::NoResponse);
    }
    let sd = std_dev(lead, y0);
    let tolerance = STEADY_FRACTION * change.abs();
    if sd >= tolerance {
        return Err(AnalyzerError::ProtocolViolation { std_dev: sd, tolerance });
    }
    let threshold = y0 + TAU_FRACTION * change;
    // Progress towards the final value, so one comparison covers both signs.
    let progress = |y: f64| (y - y0) / change;
    for k in event_step..series.len() {
        let p = progress(series[k]);
        if p >= TAU_FRACTION {
            let t = if k == event_step {
                0.0
            } else {
                let p0 = progress(series[k - 1]);
                let frac = (TAU_FRACTION - p0) / (p - p0);
                (k - 1 - event_step) as f64 + frac
            };
            return Ok(StepResponse {
                response_time_s: t * step_size_s,
                y0,
                y_final,
                threshold,
            });
        }
    }
    Err(AnalyzerError::NoResponse)
}

/// Declared hunting thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HuntingParams {
    pub settle_s: f64,
    /// Evaluation window after settling; `None` runs to the end.
    pub window_s: Option<f64>,
    pub eps_amp: f64,
    pub n_min: usize,
}

impl Default for HuntingParams {
    fn default() -> Self {
        Self {
            settle_s: 600.0,
            window_s: Some(1800.0),
            eps_amp: 0.5,
            n_min: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HuntingVerdict {
    pub peak_to_peak: f64,
    pub crossings: usize,
    pub is_hunting: bool,
    /// Twice the mean spacing between crossings; `None` below two crossings.
    pub period_s: Option<f64>,
    pub samples: usize,
}

/// Hunting verdict for `pv` tracking `sp`.
///
/// Crossings are sign changes of `pv - sp`; exact zeros carry the previous
/// sign. `is_hunting` iff peak-to-peak error exceeds `eps_amp` and at least
/// `n_min` crossings occur inside the evaluation window.
pub fn hunting_metric(
    pv: &[f64],
    sp: &[f64],
    step_size_s: f64,
    p: &HuntingParams,
) -> Result<HuntingVerdict, AnalyzerError> {
    if pv.len() != sp.len() {
        return Err(AnalyzerError::LengthMismatch {
            a: pv.len(),
            b: sp.len(),
        });
    }
    let start = ((p.settle_s / step_size_s) - 1e-9).ceil().max(0.0) as usize;
    let end = match p.window_s {
        Some(w) => (start + ((w / step_size_s) + 1e-9).floor() as usize + 1).min(pv.len()),
        None => pv.len(),
    };
    let n = end.saturating_sub(start);
    if n < 4 {
        return Err(AnalyzerError::InsufficientData(format!(
            "hunting window holds {n} samples; need at least 4"
        )));
    }
    let err: Vec<f64> = (start..end).map(|i| pv[i] - sp[i]).collect();
    let (lo, hi) = err.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
        (lo.min(e), hi.max(e))
    });
    let mut crossing_at = Vec::new();
    let mut sign = 0.0f64;
    for (i, &e) in err.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let s = e.signum();
        if sign != 0.0 && s != sign {
            crossing_at.push(i);
        }
        sign = s;
    }
    let crossings = crossing_at.len();
    let period_s = (crossings >= 2).then(|| {
        let span = (crossing_at[crossings - 1] - crossing_at[0]) as f64;
        2.0 * span / (crossings - 1) as f64 * step_size_s
    });
    let peak_to_peak = hi - lo;
    Ok(HuntingVerdict {
        peak_to_peak,
        crossings,
        is_hunting: peak_to_peak > p.eps_amp && crossings >= p.n_min,
        period_s,
        samples: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayBound {
    pub bound_s: f64,
    pub matched_steps: usize,
    /// Step whose exchange took longest.
    pub worst_step: u64,
}

/// Upper bound on the round-trip exchange delay: the largest gap between
/// the hardware sending a step's measurements and receiving that step's
/// results. Steps present in only one log are ignored.
pub fn comm_delay_bound(sends: &[(u64, u64)], receives: &[(u64, u64)]) -> Result<DelayBound, AnalyzerError> {
    let sent: std::collections::BTreeMap<u64, u64> = sends.iter().copied().collect();
    let mut best: Option<(u64, u64)> = None;
    let mut matched = 0;
    for &(step, rx_ms) in receives {
        let Some(&tx_ms) = sent.get(&step) else { continue };
        matched += 1;
        let gap = rx_ms.saturating_sub(tx_ms);
        if best.is_none_or(|(_, g)| gap > g) {
            best = Some((step, gap));
        }
    }
    let (worst_step, gap) =
        best.ok_or_else(|| AnalyzerError::InsufficientData("no step appears in both send and receive logs".into()))?;
    Ok(DelayBound {
        bound_s: gap as f64 / 1000.0,
        matched_steps: matched,
        worst_step,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityVerdict {
    Ok,
    /// Peak load exceeds the upper ratio: the equipment is too small.
    Undersized,
    /// Peak load below the lower ratio: the equipment is too large.
    Oversized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub peak_load_w: f64,
    pub rated_capacity_w: f64,
    pub ratio: f64,
    pub verdict: CapacityVerdict,
}

pub const CAPACITY_RATIO_LO: f64 = 0.5;
pub const CAPACITY_RATIO_HI: f64 = 1.0;

pub fn capacity_check(
    peak_load_w: f64,
    rated_capacity_w: f64,
    lo: f64,
    hi: f64,
) -> Result<CapacityReport, AnalyzerError> {
    if !(peak_load_w > 0.0 && peak_load_w.is_finite()) {
        return Err(AnalyzerError::Domain(format!(
            "peak load must be positive, got {peak_load_w}"
        )));
    }
    if !(rated_capacity_w > 0.0 && rated_capacity_w.is_finite()) {
        return Err(AnalyzerError::Domain(format!(
            "rated capacity must be positive, got {rated_capacity_w}"
        )));
    }
    if !(lo <= hi) {
        return Err(AnalyzerError::Domain(format!("ratio range [{lo}, {hi}] is empty")));
    }
    let ratio = peak_load_w / rated_capacity_w;
    let verdict = if ratio > hi {
        CapacityVerdict::Undersized
    } else if ratio < lo {
        CapacityVerdict::Oversized
    } else {
        CapacityVerdict::Ok
    };
    Ok(CapacityReport {
        peak_load_w,
        rated_capacity_w,
        ratio,
        verdict,
    })
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn std_dev(x: &[f64], m: f64) -> f64 {
    (x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rmse_identical_is_zero() {
        let a = [1.0, 2.0, 3.5, -1.0];
        assert_eq!(rmse_shift(&a, &a, 0).unwrap(), 0.0);
    }

    #[test]
    fn rmse_alternating_pair_is_one() {
        let a = [0.0, 1.0, 0.0, 1.0];
        let b = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(rmse_shift(&a, &b, 0).unwrap(), 1.0);
    }

    #[test]
    fn negative_shift_recovers_one_step_lag() {
        // a lags b by one step: a[t] = b[t-1].
        let b: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut a = vec![b[0]];
        a.extend_from_slice(&b[..19]);
        assert_eq!(rmse_shift(&a, &b, -1).unwrap(), 0.0);
        assert!(rmse_shift(&a, &b, 0).unwrap() > 0.0);
        assert_eq!(rmse_shift(&b, &a, 1).unwrap(), 0.0);
    }

    #[test]
    fn rmse_short_overlap_is_insufficient() {
        let a = [1.0, 2.0, 3.0];
        assert!(matches!(rmse_shift(&a, &a, 2), Err(AnalyzerError::InsufficientData(_))));
        assert!(matches!(
            rmse_shift(&a, &a, -5),
            Err(AnalyzerError::InsufficientData(_))
        ));
        assert!(rmse_shift(&a, &a, 1).is_ok());
    }

    #[test]
    fn rmse_length_mismatch() {
        assert!(matches!(
            rmse_shift(&[1.0, 2.0], &[1.0], 0),
            Err(AnalyzerError::LengthMismatch { .. })
        ));
    }

    fn first_order(tau: f64, n: usize, event: usize, y0: f64, y1: f64) -> Vec<f64> {
        (0..n)
            .map(|k| {
                if k <= event {
                    y0
                } else {
                    y1 + (y0 - y1) * (-((k - event) as f64) / tau).exp()
                }
            })
            .collect()
    }

    #[test]
    fn first_order_tau_120_is_recovered() {
        let y = first_order(120.0, 2400, 600, 21.1, 22.2);
        let r = response_time(&y, 600, 300, 1.0).unwrap();
        assert!((r.response_time_s - 120.0).abs() <= 1.0, "{}", r.response_time_s);
    }

    #[test]
    fn instantaneous_step_is_zero() {
        let mut y = vec![1.0; 50];
        for v in &mut y[20..] {
            *v = 3.0;
        }
        assert_eq!(response_time(&y, 20, 10, 1.0).unwrap().response_time_s, 0.0);
    }

    #[test]
    fn flat_series_is_no_response() {
        let y = vec![5.0; 60];
        assert!(matches!(response_time(&y, 20, 10, 1.0), Err(AnalyzerError::NoResponse)));
    }

    #[test]
    fn noisy_lead_is_protocol_violation() {
        let mut y = first_order(10.0, 200, 50, 0.0, 1.0);
        for (i, v) in y[40..50].iter_mut().enumerate() {
            *v += if i % 2 == 0 { 0.1 } else { -0.1 };
        }
        assert!(matches!(
            response_time(&y, 50, 20, 1.0),
            Err(AnalyzerError::ProtocolViolation { .. })
        ));
    }

    #[test]
    fn falling_step_is_measured() {
        let y = first_order(30.0, 400, 50, 22.2, 21.1);
        let r = response_time(&y, 50, 50, 1.0).unwrap();
        assert!((r.response_time_s - 30.0).abs() < 1.0);
    }

    #[test]
    fn constant_tracking_is_not_hunting() {
        let pv = vec![24.0; 3000];
        let v = hunting_metric(&pv, &pv, 1.0, &HuntingParams::default()).unwrap();
        assert!(!v.is_hunting);
        assert_eq!(v.crossings, 0);
        assert_eq!(v.peak_to_peak, 0.0);
        assert_eq!(v.period_s, None);
    }

    #[test]
    fn sine_240s_is_hunting_with_period_240() {
        let sp = vec![24.0; 2400];
        let pv: Vec<f64> = (0..2400)
            .map(|k| 24.0 + (2.0 * PI * (k as f64 + 0.5) / 240.0).sin())
            .collect();
        let v = hunting_metric(&pv, &sp, 1.0, &HuntingParams::default()).unwrap();
        assert!(v.is_hunting);
        assert!(v.peak_to_peak > 1.99);
        assert!((v.period_s.unwrap() - 240.0).abs() < 2.0, "{:?}", v.period_s);
        // Zeros at 719.5 + 120 m inside [600, 2400].
        assert_eq!(v.crossings, 14);
    }

    #[test]
    fn decayed_oscillation_is_not_hunting() {
        let sp = vec![0.0; 2400];
        let pv: Vec<f64> = (0..2400)
            .map(|k| {
                let t = k as f64;
                2.0 * (-t / 60.0).exp() * (2.0 * PI * (t + 0.5) / 240.0).sin()
            })
            .collect();
        let v = hunting_metric(&pv, &sp, 1.0, &HuntingParams::default()).unwrap();
        assert!(!v.is_hunting);
        assert!(v.peak_to_peak < 0.5);
    }

    #[test]
    fn short_window_is_insufficient() {
        let x = vec![0.0; 12];
        let p = HuntingParams {
            settle_s: 600.0,
            ..HuntingParams::default()
        };
        assert!(matches!(
            hunting_metric(&x, &x, 60.0, &p),
            Err(AnalyzerError::InsufficientData(_))
        ));
    }

    #[test]
    fn delay_bound_takes_worst_matched_step() {
        let sends = [(0, 0), (1, 60_000), (2, 120_000)];
        let recvs = [(0, 5_000), (1, 66_000), (7, 1_000_000)];
        let b = comm_delay_bound(&sends, &recvs).unwrap();
        assert_eq!(b.bound_s, 6.0);
        assert_eq!(b.worst_step, 1);
        assert_eq!(b.matched_steps, 2);
        assert!(matches!(
            comm_delay_bound(&sends, &[(9, 1)]),
            Err(AnalyzerError::InsufficientData(_))
        ));
    }

    #[test]
    fn capacity_verdicts() {
        let ok = capacity_check(8000.0, 10_000.0, CAPACITY_RATIO_LO, CAPACITY_RATIO_HI).unwrap();
        assert_eq!(ok.ratio, 0.8);
        assert_eq!(ok.verdict, CapacityVerdict::Ok);
        let under = capacity_check(12_000.0, 10_000.0, CAPACITY_RATIO_LO, CAPACITY_RATIO_HI).unwrap();
        assert_eq!(under.ratio, 1.2);
        assert_eq!(under.verdict, CapacityVerdict::Undersized);
        let over = capacity_check(1000.0, 10_000.0, CAPACITY_RATIO_LO, CAPACITY_RATIO_HI).unwrap();
        assert_eq!(over.verdict, CapacityVerdict::Oversized);
        assert!(matches!(
            capacity_check(0.0, 1.0, 0.5, 1.0),
            Err(AnalyzerError::Domain(_))
        ));
        assert!(matches!(
            capacity_check(1.0, -1.0, 0.5, 1.0),
            Err(AnalyzerError::Domain(_))
        ));
    }

    fn series(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (
            prop::collection::vec(-100.0f64..100.0, len),
            prop::collection::vec(-100.0f64..100.0, len),
        )
    }

    proptest! {
        #[test]
        fn rmse_symmetric_under_swap_and_negation((a, b) in series(30), s in -10i64..=10) {
            let x = rmse_shift(&a, &b, s).unwrap();
            let y = rmse_shift(&b, &a, -s).unwrap();
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }

        #[test]
        fn rmse_scales_with_abs_c((a, b) in series(25), s in -5i64..=5, c in -20.0f64..20.0) {
            let ca: Vec<f64> = a.iter().map(|v| c * v).collect();
            let cb: Vec<f64> = b.iter().map(|v| c * v).collect();
            let x = rmse_shift(&ca, &cb, s).unwrap();
            let y = c.abs() * rmse_shift(&a, &b, s).unwrap();
            prop_assert!((x - y).abs() <= 1e-9 * y.max(1.0));
        }

        #[test]
        fn rmse_self_is_zero(a in prop::collection::vec(-1e3f64..1e3, 2..50)) {
            prop_assert_eq!(rmse_shift(&a, &a, 0).unwrap(), 0.0);
        }

        #[test]
        fn known_delay_is_recovered(
            d in -5i64..=5,
            phases in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3),
            noise in prop::collection::vec(-0.01f64..0.01, 200),
        ) {
            // a[t] = x[t - d] + noise, b[t] = x[t]: a matches b shifted by -d.
            let x = |t: i64| {
                let t = t as f64;
                (t * 0.21 + phases[0]).sin() + 0.6 * (t * 0.53 + phases[1]).sin() + 0.3 * (t * 1.37 + phases[2]).cos()
            };
            let a: Vec<f64> = (0..200).map(|t| x(t - d) + noise[t as usize]).collect();
            let b: Vec<f64> = (0..200).map(x).collect();
            let (best, _) = best_shift(&a, &b, -8..=8).unwrap();
            prop_assert_eq!(best, -d);
        }

        #[test]
        fn response_time_affine_invariant(
            tau in 5.0f64..80.0,
            scale in prop_oneof![-50.0f64..-0.1, 0.1f64..50.0],
            offset in -100.0f64..100.0,
        ) {
            let y = first_order(tau, 800, 100, 0.0, 1.0);
            let z: Vec<f64> = y.iter().map(|v| scale * v + offset).collect();
            let r1 = response_time(&y, 100, 100, 1.0).unwrap().response_time_s;
            let r2 = response_time(&z, 100, 100, 1.0).unwrap().response_time_s;
            prop_assert!((r1 - r2).abs() <= 1e-6 * r1.max(1.0));
        }

        #[test]
        fn capacity_ratio_is_quotient(peak in 1.0f64..1e6, rated in 1.0f64..1e6) {
            let r = capacity_check(peak, rated, 0.5, 1.0).unwrap();
            prop_assert_eq!(r.ratio, peak / rated);
            prop_assert_eq!(r.verdict == CapacityVerdict::Ok, (0.5..=1.0).contains(&r.ratio));
        }
    }
}
