//! Integration-quality metrics over sealed run logs.
//!
//! Every function here is pure. The [`metrics`] functions work on plain
//! slices; the helpers in this module pull the matching series out of a
//! [`RunLog`] first.

mod metrics;

use thiserror::Error;

pub use metrics::{
    best_shift, capacity_check, comm_delay_bound, hunting_metric, response_time, rmse_shift, CapacityReport,
    CapacityVerdict, DelayBound, HuntingParams, HuntingVerdict, StepResponse, CAPACITY_RATIO_HI, CAPACITY_RATIO_LO,
    LEAD_WINDOW, STEADY_FRACTION, TAU_FRACTION,
};

use crate::datastore::{RunLog, Source, StoreError};
use crate::orchestrator::names;

#[derive(Debug, Error)]
pub enum AnalyzerError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("series lengths differ: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("no response: the series never reaches 63.2 % of its final change")]
    NoResponse,
    #[error("pre-event window is not steady: std dev {std_dev} >= tolerance {tolerance}")]
    ProtocolViolation { std_dev: f64, tolerance: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl AnalyzerError {
    /// True for errors caused by too little data rather than bad data.
    pub fn is_insufficient_data(&self) -> bool {
        matches!(self, AnalyzerError::InsufficientData(_))
    }
}

/// `name:source` address of a logged variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesRef {
    pub name: String,
    pub source: Source,
}

impl std::str::FromStr for SeriesRef {
    type Err = AnalyzerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, source) = s
            .rsplit_once(':')
            .ok_or_else(|| AnalyzerError::Domain(format!("expected name:source, got '{s}'")))?;
        let source = source
            .parse::<Source>()
            .map_err(|_| AnalyzerError::Domain(format!("unknown source '{source}' in '{s}'")))?;
        if name.is_empty() {
            return Err(AnalyzerError::Domain(format!("empty variable name in '{s}'")));
        }
        Ok(Self {
            name: name.to_string(),
            source,
        })
    }
}

impl std::fmt::Display for SeriesRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.name, self.source)
    }
}

/// Dense series of `r` from a log.
pub fn series(log: &RunLog, r: &SeriesRef) -> Result<Vec<f64>, AnalyzerError> {
    Ok(log.dense_series(&r.name, r.source)?)
}

pub fn rmse_in_log(log: &RunLog, a: &SeriesRef, b: &SeriesRef, shift: i64) -> Result<f64, AnalyzerError> {
    rmse_shift(&series(log, a)?, &series(log, b)?, shift)
}

/// Step response of `r` to an event at simulated time `event_time_s`.
pub fn step_response_in_log(
    log: &RunLog,
    r: &SeriesRef,
    event_time_s: f64,
    final_window: usize,
) -> Result<StepResponse, AnalyzerError> {
    let dt = log.metadata.step_size_s;
    let event_step = (event_time_s / dt).round() as usize;
    response_time(&series(log, r)?, event_step, final_window, dt)
}

pub fn hunting_in_log(
    log: &RunLog,
    pv: &SeriesRef,
    sp: &SeriesRef,
    p: &HuntingParams,
) -> Result<HuntingVerdict, AnalyzerError> {
    hunting_metric(&series(log, pv)?, &series(log, sp)?, log.metadata.step_size_s, p)
}

/// `(step, wall_ms)` pairs.
pub type Stamps = Vec<(u64, u64)>;

/// Wall-clock send stamps of each step's measurements and receive stamps of
/// each step's results, both as `(step, wall_ms)`.
pub fn exchange_stamps(log: &RunLog) -> (Stamps, Stamps) {
    let mut sends = Vec::new();
    let mut recvs = Vec::new();
    for f in log.frames() {
        for (k, s) in &f.entries {
            let Some(ms) = s.wall_time_ms else { continue };
            if k.name() == names::ZONE_T && k.source() == Source::Emulated {
                sends.push((f.step_index, ms));
            } else if k.name() == names::RX_STEP && k.source() == Source::Setpoint && s.value >= 0.0 {
                recvs.push((s.value as u64, ms));
            }
        }
    }
    (sends, recvs)
}

pub fn delay_bound_in_log(log: &RunLog) -> Result<DelayBound, AnalyzerError> {
    let (s, r) = exchange_stamps(log);
    comm_delay_bound(&s, &r)
}

/// Largest value of `r` over the run.
pub fn peak_in_log(log: &RunLog, r: &SeriesRef) -> Result<f64, AnalyzerError> {
    let v = series(log, r)?;
    v.into_iter()
        .reduce(f64::max)
        .ok_or_else(|| AnalyzerError::InsufficientData(format!("{r} has no samples")))
}

/// Trapezoid-free left Riemann sum of `r` over steps `[from, to)`, in
/// value-seconds (J for a W series).
pub fn integral_in_log(log: &RunLog, r: &SeriesRef, from: usize, to: usize) -> Result<f64, AnalyzerError> {
    let v = series(log, r)?;
    if from >= to || to > v.len() {
        return Err(AnalyzerError::InsufficientData(format!(
            "integration range [{from}, {to}) outside {} samples",
            v.len()
        )));
    }
    Ok(v[from..to].iter().sum::<f64>() * log.metadata.step_size_s)
}
