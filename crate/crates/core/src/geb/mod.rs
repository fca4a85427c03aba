//! Supervisory grid-interactive controller: rule-based setpoint overrides
//! for efficiency, shed, shift and modulate events, and a latency-modeled
//! harness for slow (optimization-based) controllers.

mod rbc;
mod slow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rbc::{rbc_step, RbcOutput};
pub use slow::{RbcPolicy, SlowControllerHarness, SlowInputs, SlowPolicy, SlowResult};

/// Control signals sent to the plant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SupervisorySetpoints {
    pub cooling_c: f64,
    pub heating_c: f64,
    pub discharge_c: f64,
    /// Placeholder channel; carried but not acted on by the plant.
    pub static_pressure_pa: Option<f64>,
}

impl Default for SupervisorySetpoints {
    fn default() -> Self {
        Self {
            cooling_c: 24.0,
            heating_c: 20.0,
            discharge_c: 13.0,
            static_pressure_pa: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GebMode {
    #[default]
    Efficiency,
    Shed,
    Shift,
    Modulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[default]
    Rbc,
    Slow,
}

/// Grid event. `magnitude` overrides the mode's default offset (°C) or,
/// for modulate, the modulation depth (°C).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventWindow {
    pub start_s: f64,
    pub end_s: f64,
    #[serde(default)]
    pub magnitude: Option<f64>,
}

impl EventWindow {
    pub fn contains(&self, t: f64) -> bool {
        self.start_s <= t && t < self.end_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetpointBounds {
    pub min_c: f64,
    pub max_c: f64,
    /// Minimum heating-to-cooling gap.
    pub min_gap_c: f64,
}

impl Default for SetpointBounds {
    fn default() -> Self {
        Self {
            min_c: 10.0,
            max_c: 35.0,
            min_gap_c: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlowParams {
    pub compute_latency_s: f64,
    /// Results older than this many steps are replaced by the RBC output.
    pub freshness_steps: u64,
}

impl Default for SlowParams {
    fn default() -> Self {
        Self {
            compute_latency_s: 90.0,
            freshness_steps: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GebParams {
    pub mode: GebMode,
    pub controller: ControllerKind,
    pub baseline: SupervisorySetpoints,
    pub windows: Vec<EventWindow>,
    pub delta_eff_c: f64,
    pub delta_shed_c: f64,
    pub delta_pre_c: f64,
    pub pre_window_s: f64,
    pub depth_c: f64,
    pub r_max_c_per_step: f64,
    pub bounds: SetpointBounds,
    /// Modulation signal per step in [-1, 1]; the last value is held.
    pub signal: Vec<f64>,
    pub slow: SlowParams,
}

impl Default for GebParams {
    fn default() -> Self {
        Self {
            mode: GebMode::default(),
            controller: ControllerKind::default(),
            baseline: SupervisorySetpoints::default(),
            windows: Vec::new(),
            delta_eff_c: 1.0,
            delta_shed_c: 2.0,
            delta_pre_c: 1.5,
            pre_window_s: 7200.0,
            depth_c: 1.0,
            r_max_c_per_step: 0.5,
            bounds: SetpointBounds::default(),
            signal: Vec::new(),
            slow: SlowParams::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GebError {
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("slow controller busy: computation submitted at step {submitted} still pending")]
    Busy { submitted: u64 },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> GebError {
    GebError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

impl GebParams {
    /// Signal value for `step`, holding the last sample past the end.
    pub fn signal_at(&self, step: u64) -> f64 {
        match self.signal.len() {
            0 => 0.0,
            n => self.signal[(step as usize).min(n - 1)],
        }
    }

    /// Field names are relative to the `geb` block.
    pub fn validate(&self) -> Result<(), GebError> {
        let b = &self.bounds;
        if !(b.min_c < b.max_c) {
            return Err(invalid("bounds.max_c", "must exceed bounds.min_c"));
        }
        if !(b.min_gap_c >= 0.0) {
            return Err(invalid("bounds.min_gap_c", "must be non-negative"));
        }
        let base = &self.baseline;
        if !(base.heating_c + b.min_gap_c <= base.cooling_c) {
            return Err(invalid(
                "baseline.heating_c",
                "must be below cooling_c by at least bounds.min_gap_c",
            ));
        }
        for (name, v) in [
            ("baseline.cooling_c", base.cooling_c),
            ("baseline.heating_c", base.heating_c),
        ] {
            if !(b.min_c..=b.max_c).contains(&v) {
                return Err(invalid(name, "outside bounds"));
            }
        }
        for (name, v) in [
            ("delta_eff_c", self.delta_eff_c),
            ("delta_shed_c", self.delta_shed_c),
            ("delta_pre_c", self.delta_pre_c),
            ("pre_window_s", self.pre_window_s),
            ("depth_c", self.depth_c),
            ("r_max_c_per_step", self.r_max_c_per_step),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be finite and non-negative"));
            }
        }
        for (i, s) in self.signal.iter().enumerate() {
            if !(-1.0..=1.0).contains(s) {
                return Err(invalid(format!("signal[{i}]"), "must lie in [-1, 1]"));
            }
        }
        let mut windows = self.windows.clone();
        for (i, w) in windows.iter().enumerate() {
            if !(w.start_s < w.end_s) || !w.start_s.is_finite() || !w.end_s.is_finite() {
                return Err(invalid(format!("windows[{i}].end_s"), "must exceed start_s"));
            }
            if w.magnitude.is_some_and(|m| !m.is_finite()) {
                return Err(invalid(format!("windows[{i}].magnitude"), "must be finite"));
            }
        }
        windows.sort_by(|a, b| a.start_s.total_cmp(&b.start_s));
        for pair in windows.windows(2) {
            if pair[1].start_s < pair[0].end_s {
                return Err(invalid("windows", "event windows overlap"));
            }
        }
        if !(self.slow.compute_latency_s >= 0.0 && self.slow.compute_latency_s.is_finite()) {
            return Err(invalid("slow.compute_latency_s", "must be finite and non-negative"));
        }
        Ok(())
    }
}
