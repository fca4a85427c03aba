use super::{GebMode, GebParams, SupervisorySetpoints};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbcOutput {
    pub setpoints: SupervisorySetpoints,
    /// A rule result violated the global bounds or ordering and was clamped.
    pub clamped: bool,
    /// Some event segment (including a shift pre-window) is active.
    pub active: bool,
}

enum Segment {
    Outside,
    PreWindow,
    Inside(f64),
}

fn segment(p: &GebParams, t: f64) -> Segment {
    for w in &p.windows {
        if w.contains(t) {
            let default = match p.mode {
                GebMode::Efficiency => p.delta_eff_c,
                GebMode::Shed | GebMode::Shift => p.delta_shed_c,
                GebMode::Modulate => p.depth_c,
            };
            return Segment::Inside(w.magnitude.unwrap_or(default));
        }
    }
    if p.mode == GebMode::Shift {
        for w in &p.windows {
            if w.start_s - p.pre_window_s <= t && t < w.start_s {
                return Segment::PreWindow;
            }
        }
    }
    Segment::Outside
}

/// Rule-based supervisory step at sim time `clock_s`.
///
/// Pure given its inputs. `previous_cooling_c` is the cooling setpoint
/// this controller emitted last step; it anchors the modulate rate limit
/// (`None` anchors at the baseline). Outside every event segment the
/// baseline is returned unchanged.
pub fn rbc_step(
    p: &GebParams,
    clock_s: f64,
    baseline: &SupervisorySetpoints,
    signal: f64,
    previous_cooling_c: Option<f64>,
) -> RbcOutput {
    let seg = segment(p, clock_s);
    if let Segment::Outside = seg {
        return RbcOutput {
            setpoints: *baseline,
            clamped: false,
            active: false,
        };
    }
    let mut out = *baseline;
    match (p.mode, seg) {
        (_, Segment::Outside) => unreachable!(),
        (_, Segment::PreWindow) => out.cooling_c = baseline.cooling_c - p.delta_pre_c,
        (GebMode::Efficiency, Segment::Inside(d)) => {
            let mid = 0.5 * (baseline.cooling_c + baseline.heating_c);
            let half = 0.5 * (baseline.cooling_c - baseline.heating_c) + 0.5 * d;
            out.cooling_c = mid + half;
            out.heating_c = mid - half;
        }
        (GebMode::Shed | GebMode::Shift, Segment::Inside(d)) => out.cooling_c = baseline.cooling_c + d,
        (GebMode::Modulate, Segment::Inside(depth)) => {
            let target = baseline.cooling_c + depth * signal.clamp(-1.0, 1.0);
            let prev = previous_cooling_c.unwrap_or(baseline.cooling_c);
            let r = p.r_max_c_per_step;
            out.cooling_c = prev + (target - prev).clamp(-r, r);
        }
    }
    let clamped = enforce_bounds(p, &mut out);
    RbcOutput {
        setpoints: out,
        clamped,
        active: true,
    }
}

/// Clamps into the global bounds and restores the heating/cooling gap.
/// Returns whether anything changed.
pub(crate) fn enforce_bounds(p: &GebParams, s: &mut SupervisorySetpoints) -> bool {
    let b = &p.bounds;
    let before = *s;
    s.cooling_c = s.cooling_c.clamp(b.min_c + b.min_gap_c, b.max_c);
    s.heating_c = s.heating_c.clamp(b.min_c, b.max_c - b.min_gap_c);
    if s.heating_c > s.cooling_c - b.min_gap_c {
        s.heating_c = s.cooling_c - b.min_gap_c;
    }
    *s != before
}

#[cfg(test)]
mod tests {
    use super::super::EventWindow;
    use super::*;
    use proptest::prelude::*;

    fn params(mode: GebMode) -> GebParams {
        GebParams {
            mode,
            windows: vec![EventWindow {
                start_s: 10_000.0,
                end_s: 20_000.0,
                magnitude: None,
            }],
            ..GebParams::default()
        }
    }

    #[test]
    fn outside_windows_passes_baseline() {
        let base = SupervisorySetpoints::default();
        for mode in [GebMode::Efficiency, GebMode::Shed, GebMode::Shift, GebMode::Modulate] {
            let out = rbc_step(&params(mode), 500.0, &base, 1.0, Some(30.0));
            assert_eq!(out.setpoints, base);
            assert!(!out.active && !out.clamped);
        }
    }

    #[test]
    fn shed_raises_cooling_setpoint() {
        let out = rbc_step(
            &params(GebMode::Shed),
            15_000.0,
            &SupervisorySetpoints::default(),
            0.0,
            None,
        );
        assert_eq!(out.setpoints.cooling_c, 26.0);
        assert_eq!(out.setpoints.heating_c, 20.0);
    }

    #[test]
    fn shift_precools_then_sheds() {
        let p = params(GebMode::Shift);
        let base = SupervisorySetpoints::default();
        assert_eq!(
            rbc_step(&p, 10_000.0 - 7_200.0, &base, 0.0, None).setpoints.cooling_c,
            22.5
        );
        assert_eq!(rbc_step(&p, 9_999.0, &base, 0.0, None).setpoints.cooling_c, 22.5);
        assert_eq!(rbc_step(&p, 10_000.0, &base, 0.0, None).setpoints.cooling_c, 26.0);
        assert_eq!(rbc_step(&p, 20_000.0, &base, 0.0, None).setpoints, base);
    }

    #[test]
    fn efficiency_widens_symmetrically() {
        let out = rbc_step(
            &params(GebMode::Efficiency),
            12_000.0,
            &SupervisorySetpoints::default(),
            0.0,
            None,
        );
        assert_eq!(out.setpoints.cooling_c, 24.5);
        assert_eq!(out.setpoints.heating_c, 19.5);
    }

    #[test]
    fn modulate_is_rate_limited() {
        let p = params(GebMode::Modulate);
        let base = SupervisorySetpoints::default();
        let mut prev = None;
        let mut outputs = Vec::new();
        for k in 0..20 {
            let signal = if k % 2 == 0 { 1.0 } else { -1.0 };
            let out = rbc_step(&p, 10_000.0 + 60.0 * k as f64, &base, signal, prev);
            prev = Some(out.setpoints.cooling_c);
            outputs.push(out.setpoints.cooling_c);
        }
        // Recurrence: 24 -> 24.5 -> 24.0 -> 24.5 ...
        for (k, v) in outputs.iter().enumerate() {
            let want = if k % 2 == 0 { 24.5 } else { 24.0 };
            assert_eq!(*v, want);
        }
    }

    #[test]
    fn modulate_ramps_toward_distant_target() {
        let mut p = params(GebMode::Modulate);
        p.windows[0].magnitude = Some(3.0);
        let base = SupervisorySetpoints::default();
        let mut prev = None;
        for k in 1..=6 {
            let out = rbc_step(&p, 10_000.0 + 60.0 * k as f64, &base, 1.0, prev);
            let want = (24.0 + 0.5 * k as f64).min(27.0);
            assert_eq!(out.setpoints.cooling_c, want);
            prev = Some(out.setpoints.cooling_c);
        }
    }

    #[test]
    fn bound_violation_is_clamped_and_flagged() {
        let mut p = params(GebMode::Shed);
        p.windows[0].magnitude = Some(20.0);
        let out = rbc_step(&p, 15_000.0, &SupervisorySetpoints::default(), 0.0, None);
        assert_eq!(out.setpoints.cooling_c, 35.0);
        assert!(out.clamped);
    }

    proptest! {
        #[test]
        fn outputs_are_bounded_and_ordered(
            mode in prop_oneof![Just(GebMode::Efficiency), Just(GebMode::Shed), Just(GebMode::Shift), Just(GebMode::Modulate)],
            mag in -30.0..30.0f64,
            clg in 12.0..34.0f64,
            gap in 1.0..8.0f64,
            t in 0.0..30_000.0f64,
            signal in -1.0..1.0f64,
            prev in proptest::option::of(0.0..40.0f64),
        ) {
            let mut p = params(mode);
            p.windows[0].magnitude = Some(mag);
            let base = SupervisorySetpoints { cooling_c: clg, heating_c: (clg - gap).max(10.0), ..SupervisorySetpoints::default() };
            let out = rbc_step(&p, t, &base, signal, prev);
            let s = out.setpoints;
            if out.active {
                prop_assert!(s.cooling_c >= p.bounds.min_c && s.cooling_c <= p.bounds.max_c);
                prop_assert!(s.heating_c >= p.bounds.min_c && s.heating_c <= p.bounds.max_c);
                prop_assert!(s.heating_c + p.bounds.min_gap_c <= s.cooling_c + 1e-12);
            } else {
                prop_assert_eq!(s, base);
            }
        }
    }
}
