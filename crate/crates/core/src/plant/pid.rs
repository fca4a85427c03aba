use serde::{Deserialize, Serialize};

/// Sign convention of a loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    /// Output rises when the process value is below setpoint (heating).
    #[default]
    Direct,
    /// Output rises when the process value is above setpoint (cooling).
    Reverse,
}

/// Tuning and limits for one loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    pub kp: f64,
    #[serde(default)]
    pub ki: f64,
    #[serde(default)]
    pub kd: f64,
    #[serde(default = "neg_inf", skip_serializing_if = "is_unbounded")]
    pub output_min: f64,
    #[serde(default = "pos_inf", skip_serializing_if = "is_unbounded")]
    pub output_max: f64,
    #[serde(default)]
    pub action: Action,
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}

fn pos_inf() -> f64 {
    f64::INFINITY
}

fn is_unbounded(v: &f64) -> bool {
    v.is_infinite()
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        Self {
            kp,
            ki,
            kd,
            output_min: f64::NEG_INFINITY,
            output_max: f64::INFINITY,
            action: Action::Direct,
        }
    }

    pub fn limits(mut self, min: f64, max: f64) -> Self {
        self.output_min = min;
        self.output_max = max;
        self
    }

    pub fn reverse(mut self) -> Self {
        self.action = Action::Reverse;
        self
    }
}

/// Positional PID with clamping anti-windup and derivative on measurement.
///
/// `integral` holds the integral *contribution* (already multiplied by
/// `ki`). While the output sits at a limit in the direction the error is
/// pushing, the integral is only allowed to grow up to the value that puts
/// the output exactly at that limit, and it is always kept within the
/// output span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PidController {
    pub gains: PidGains,
    pub integral: f64,
    pub last_pv: Option<f64>,
    pub last_output: f64,
    pub faulted: bool,
}

impl PidController {
    pub fn new(gains: PidGains) -> Self {
        Self {
            gains,
            integral: 0.0,
            last_pv: None,
            last_output: 0.0,
            faulted: false,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.last_pv = None;
        self.last_output = 0.0;
        self.faulted = false;
    }

    fn span(&self) -> f64 {
        self.gains.output_max - self.gains.output_min
    }

    /// True when the last output sits at either limit.
    pub fn saturated(&self) -> bool {
        self.last_output >= self.gains.output_max || self.last_output <= self.gains.output_min
    }

    /// One controller update; returns the clamped command.
    ///
    /// Non-finite inputs or a non-positive `dt` fault the controller for this
    /// call: the previous command is returned and the state is untouched.
    pub fn step(&mut self, setpoint: f64, pv: f64, dt: f64) -> f64 {
        if !(setpoint.is_finite() && pv.is_finite() && dt.is_finite() && dt > 0.0) {
            self.faulted = true;
            return self.last_output;
        }
        self.faulted = false;
        let g = self.gains;
        let sign = match g.action {
            Action::Direct => 1.0,
            Action::Reverse => -1.0,
        };
        let error = sign * (setpoint - pv);
        let p = g.kp * error;
        let d = match self.last_pv {
            Some(prev) => -sign * g.kd * (pv - prev) / dt,
            None => 0.0,
        };
        let step = g.ki * error * dt;
        let mut integral = self.integral + step;
        if step > 0.0 {
            let room = (g.output_max - p - d).max(self.integral);
            integral = integral.min(room);
        } else if step < 0.0 {
            let room = (g.output_min - p - d).min(self.integral);
            integral = integral.max(room);
        }
        let span = self.span();
        if span.is_finite() {
            integral = integral.clamp(-span, span);
        }
        self.integral = integral;
        self.last_pv = Some(pv);
        let out = (p + integral + d).clamp(g.output_min, g.output_max);
        self.last_output = out;
        out
    }
}
