//! Outdoor emulator: first-order tracking of a weather or ground-water
//! target, clamped to what the equipment can physically produce.

use serde::{Deserialize, Serialize};

use super::PlantError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutdoorKind {
    Air,
    Water,
}

/// Producible range. Humidity limits are ignored for water emulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Envelope {
    pub t_min_c: f64,
    pub t_max_c: f64,
    #[serde(default = "rh_min")]
    pub rh_min_pct: f64,
    #[serde(default = "rh_max")]
    pub rh_max_pct: f64,
}

fn rh_min() -> f64 {
    10.0
}

fn rh_max() -> f64 {
    100.0
}

impl Envelope {
    pub fn default_for(kind: OutdoorKind) -> Self {
        match kind {
            OutdoorKind::Air => Self {
                t_min_c: -12.0,
                t_max_c: 65.0,
                rh_min_pct: rh_min(),
                rh_max_pct: rh_max(),
            },
            OutdoorKind::Water => Self {
                t_min_c: 10.0,
                t_max_c: 55.0,
                rh_min_pct: rh_min(),
                rh_max_pct: rh_max(),
            },
        }
    }

    pub fn validate(&self) -> Result<(), PlantError> {
        if !(self.t_min_c < self.t_max_c) {
            return Err(PlantError::InvalidParameter(
                "envelope t_min_c must be below t_max_c".into(),
            ));
        }
        if !(0.0 <= self.rh_min_pct && self.rh_min_pct < self.rh_max_pct && self.rh_max_pct <= 100.0) {
            return Err(PlantError::InvalidParameter(
                "envelope humidity limits must satisfy 0 <= rh_min_pct < rh_max_pct <= 100".into(),
            ));
        }
        Ok(())
    }
}

/// Dry-bulb (or water) temperature and relative humidity. `rh_pct` is
/// carried through unchanged for water emulators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutdoorCondition {
    pub t_c: f64,
    pub rh_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutdoorEmulator {
    pub kind: OutdoorKind,
    pub envelope: Envelope,
    pub tau_s: f64,
    pub value: OutdoorCondition,
}

impl OutdoorEmulator {
    /// The initial value is clamped into the envelope.
    pub fn new(
        kind: OutdoorKind,
        envelope: Envelope,
        tau_s: f64,
        initial: OutdoorCondition,
    ) -> Result<Self, PlantError> {
        envelope.validate()?;
        if !(tau_s >= 0.0 && tau_s.is_finite()) {
            return Err(PlantError::InvalidParameter(
                "outdoor tau_s must be non-negative".into(),
            ));
        }
        let mut emu = Self {
            kind,
            envelope,
            tau_s,
            value: initial,
        };
        emu.value = emu.clamp(initial).0;
        Ok(emu)
    }

    fn clamp(&self, c: OutdoorCondition) -> (OutdoorCondition, bool) {
        let e = &self.envelope;
        let t = c.t_c.clamp(e.t_min_c, e.t_max_c);
        let rh = match self.kind {
            OutdoorKind::Air => c.rh_pct.clamp(e.rh_min_pct, e.rh_max_pct),
            OutdoorKind::Water => c.rh_pct,
        };
        let limited = t != c.t_c || rh != c.rh_pct;
        (OutdoorCondition { t_c: t, rh_pct: rh }, limited)
    }

    /// Tracks `target` for `dt` seconds; returns the new value and whether
    /// the envelope clamp was active (a limitation event).
    pub fn step(&mut self, target: OutdoorCondition, dt: f64) -> (OutdoorCondition, bool) {
        let decay = if self.tau_s > 0.0 {
            (-dt / self.tau_s).exp()
        } else {
            0.0
        };
        let raw = OutdoorCondition {
            t_c: target.t_c + (self.value.t_c - target.t_c) * decay,
            rh_pct: target.rh_pct + (self.value.rh_pct - target.rh_pct) * decay,
        };
        let (value, limited) = self.clamp(raw);
        self.value = value;
        (value, limited)
    }
}
