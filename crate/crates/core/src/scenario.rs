//! Scenario document: strict schema, defaults, dotted-key overrides and
//! cross-field validation.
//!
//! Unknown keys anywhere in the tree are rejected. Every error carries the
//! dotted path of the offending field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::building::{WeatherSeries, WeatherSource, ZoneParams};
use crate::geb::{GebError, GebParams};
use crate::occupants::OccupantParams;
use crate::plant::{Plant, PlantCommand, PlantParams, ZoneTarget};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("override {arg:?}: {reason}")]
    Override { arg: String, reason: String },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ScenarioError {
    /// Dotted path of the offending field, when there is one.
    pub fn path(&self) -> Option<&str> {
        match self {
            ScenarioError::Schema { path, .. } | ScenarioError::Invalid { path, .. } => Some(path),
            _ => None,
        }
    }
}

fn invalid(path: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        path: path.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    #[default]
    Fast,
    Realtime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OverrunPolicy {
    /// Drop the late results; the plant keeps its last setpoints.
    #[default]
    SkipAndHold,
    Abort,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunParams {
    pub id: String,
    pub step_size_s: f64,
    pub horizon: u64,
    pub mode: RunMode,
    pub seed: u64,
    pub overrun_policy: OverrunPolicy,
    /// Reported pacing tolerance in realtime mode.
    pub pacing_tolerance_ms: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            id: "scenario".into(),
            step_size_s: 60.0,
            horizon: 60,
            mode: RunMode::Fast,
            seed: 0,
            overrun_policy: OverrunPolicy::SkipAndHold,
            pacing_tolerance_ms: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// The simulate phase takes `simulate_time_s` at this step.
    SlowSimulate,
    /// No simulated zone condition reaches the plant for this step.
    Outage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub step: u64,
    pub kind: FaultKind,
    #[serde(default)]
    pub simulate_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelayParams {
    /// Round-trip communication latency per step, s.
    pub comm_latency_s: f64,
    /// Share of the latency spent on the hardware-to-software leg.
    pub uplink_fraction: f64,
    /// Upper bound of the seeded per-direction jitter, s.
    pub jitter_up_s: f64,
    pub jitter_down_s: f64,
    /// Nominal duration of the simulate phase, s.
    pub simulate_time_s: f64,
    pub faults: Vec<Fault>,
    /// Allow latencies of a step or more; late results are applied when
    /// they arrive and the plant holds its last setpoints meanwhile.
    pub stale_hold: bool,
    /// The building consumes the previous step's discharge air.
    pub inherited_delay: bool,
}

impl Default for DelayParams {
    fn default() -> Self {
        Self {
            comm_latency_s: 0.0,
            uplink_fraction: 0.5,
            jitter_up_s: 0.0,
            jitter_down_s: 0.0,
            simulate_time_s: 0.0,
            faults: Vec::new(),
            stale_hold: false,
            inherited_delay: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BuildingParams {
    pub zone: ZoneParams,
    pub weather: WeatherSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct LoggingParams {
    /// Variables whose name starts with any of these prefixes are not
    /// logged. Exchanged variables cannot be excluded.
    pub exclude: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub run: RunParams,
    pub delays: DelayParams,
    pub plant: PlantParams,
    pub building: BuildingParams,
    pub occupants: OccupantParams,
    pub geb: GebParams,
    pub logging: LoggingParams,
    /// Directory relative weather paths resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Sets `value` at dotted `path` inside `root`, creating objects as needed.
/// Numeric segments index into existing arrays.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), String> {
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err("empty key segment".into());
    }
    let mut cur = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Value::Array(items) = cur {
            let idx: usize = seg
                .parse()
                .map_err(|_| format!("segment {seg:?} must index an array"))?;
            let len = items.len();
            let slot = items
                .get_mut(idx)
                .ok_or_else(|| format!("index {idx} out of range (length {len})"))?;
            if last {
                *slot = value;
                return Ok(());
            }
            cur = slot;
            continue;
        }
        if !cur.is_object() {
            *cur = Value::Object(Default::default());
        }
        let map = cur.as_object_mut().expect("object");
        if last {
            map.insert((*seg).to_string(), value);
            return Ok(());
        }
        cur = map
            .entry((*seg).to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Parses `key=value`; the value is read as JSON when it parses, else as a
/// plain string.
pub fn parse_override(arg: &str) -> Result<(String, Value), ScenarioError> {
    let (k, v) = arg.split_once('=').ok_or_else(|| ScenarioError::Override {
        arg: arg.into(),
        reason: "expected key=value".into(),
    })?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}

impl Scenario {
    /// Parses a document, applies overrides, and validates.
    pub fn from_json_str(text: &str, overrides: &[String], base_dir: Option<&Path>) -> Result<Self, ScenarioError> {
        let mut tree: Value = serde_json::from_str(text).map_err(|e| ScenarioError::Schema {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if !tree.is_object() {
            return Err(ScenarioError::Schema {
                path: "(root)".into(),
                message: "scenario document must be an object".into(),
            });
        }
        for arg in overrides {
            let (k, v) = parse_override(arg)?;
            set_path(&mut tree, &k, v).map_err(|reason| ScenarioError::Override {
                arg: arg.clone(),
                reason,
            })?;
        }
        let mut scenario: Scenario = serde_path_to_error::deserialize(tree).map_err(|e| {
            let path = e.path().to_string();
            ScenarioError::Schema {
                path: if path == "." { "(root)".into() } else { path },
                message: e.into_inner().to_string(),
            }
        })?;
        scenario.base_dir = base_dir.map(Path::to_path_buf);
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text, overrides, path.parent())
    }

    /// Effective configuration with every default materialized.
    pub fn effective_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Sampled weather series for the configured horizon.
    pub fn weather(&self) -> Result<WeatherSeries, ScenarioError> {
        self.building
            .weather
            .series(self.base_dir.as_deref(), self.run.step_size_s, self.run.horizon)
            .map_err(|e| invalid("building.weather", e.to_string()))
    }

    /// Longest possible one-way plus return latency including jitter, s.
    pub fn max_latency_s(&self) -> f64 {
        self.delays.comm_latency_s + self.delays.jitter_up_s + self.delays.jitter_down_s
    }

    /// Substeps per exchange step.
    pub fn substeps(&self) -> u64 {
        (self.run.step_size_s / self.plant.substep_s).round() as u64
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let r = &self.run;
        if r.id.is_empty() || r.id.contains(['\n', '\r']) {
            return Err(invalid("run.id", "must be a non-empty single line"));
        }
        if !(r.step_size_s > 0.0 && r.step_size_s.is_finite()) {
            return Err(invalid("run.step_size_s", "must be positive"));
        }
        if r.horizon < 1 {
            return Err(invalid("run.horizon", "must be at least 1"));
        }
        let sub = self.plant.substep_s;
        if !(sub > 0.0 && sub <= r.step_size_s) {
            return Err(invalid(
                "plant.substep_s",
                "must be positive and at most run.step_size_s",
            ));
        }
        let ratio = r.step_size_s / sub;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(invalid("plant.substep_s", "must divide run.step_size_s"));
        }

        let d = &self.delays;
        for (name, v) in [
            ("delays.comm_latency_s", d.comm_latency_s),
            ("delays.jitter_up_s", d.jitter_up_s),
            ("delays.jitter_down_s", d.jitter_down_s),
            ("delays.simulate_time_s", d.simulate_time_s),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be finite and non-negative"));
            }
        }
        if !(0.0..=1.0).contains(&d.uplink_fraction) {
            return Err(invalid("delays.uplink_fraction", "must lie in [0, 1]"));
        }
        if !d.stale_hold {
            if d.comm_latency_s >= r.step_size_s {
                return Err(invalid(
                    "delays.comm_latency_s",
                    format!(
                        "latency {} s is not below the {} s step; set delays.stale_hold to accept late results",
                        d.comm_latency_s, r.step_size_s
                    ),
                ));
            }
            if self.max_latency_s() + d.simulate_time_s >= r.step_size_s {
                return Err(invalid(
                    "delays.simulate_time_s",
                    "latency plus jitter plus simulate time must stay below the step size; set delays.stale_hold to accept late results",
                ));
            }
        }
        for (i, f) in d.faults.iter().enumerate() {
            if f.step >= r.horizon {
                return Err(invalid(format!("delays.faults[{i}].step"), "beyond the run horizon"));
            }
            match (f.kind, f.simulate_time_s) {
                (FaultKind::SlowSimulate, Some(t)) if t >= 0.0 && t.is_finite() => {}
                (FaultKind::SlowSimulate, _) => {
                    return Err(invalid(
                        format!("delays.faults[{i}].simulate_time_s"),
                        "required and non-negative for slow_simulate",
                    ))
                }
                (FaultKind::Outage, None) => {}
                (FaultKind::Outage, Some(_)) => {
                    return Err(invalid(
                        format!("delays.faults[{i}].simulate_time_s"),
                        "not used by outage",
                    ))
                }
            }
        }

        self.building
            .zone
            .validate()
            .map_err(|e| invalid("building.zone", e.to_string()))?;
        self.building
            .weather
            .validate()
            .map_err(|e| invalid("building.weather", e.to_string()))?;
        self.weather()?;

        self.occupants
            .validate()
            .map_err(|(f, reason)| invalid(format!("occupants.{f}"), reason))?;
        self.geb.validate().map_err(|e| match e {
            GebError::Invalid { field, reason } => invalid(format!("geb.{field}"), reason),
            other => invalid("geb", other.to_string()),
        })?;

        let h = &self.plant.hvac;
        if !(h.cooling_rated_w >= 0.0 && h.heating_rated_w >= 0.0) {
            return Err(invalid("plant.hvac", "rated capacities must be non-negative"));
        }
        let probe = PlantCommand {
            zone_target: Some(ZoneTarget {
                t_c: self.building.zone.initial_t_c,
                w: 0.008,
            }),
            setpoints: self.geb.baseline,
            outdoor_target: crate::plant::OutdoorCondition {
                t_c: 20.0,
                rh_pct: 50.0,
            },
        };
        Plant::new(self.plant.clone(), probe).map_err(|e| invalid("plant", e.to_string()))?;

        for (i, p) in self.logging.exclude.iter().enumerate() {
            if p.is_empty() {
                return Err(invalid(format!("logging.exclude[{i}]"), "empty prefix"));
            }
            if let Some(name) = crate::orchestrator::EXCHANGED
                .iter()
                .find(|n| n.starts_with(p.as_str()))
            {
                return Err(invalid(
                    format!("logging.exclude[{i}]"),
                    format!("prefix '{p}' covers exchanged variable {name}, which is always logged"),
                ));
            }
        }
        Ok(())
    }
}
