//! Simulated hardware side: HVAC unit, duct-built zone emulator, outdoor
//! air and water emulators, and the PID loops driving them.
//!
//! The [`Plant`] integrates continuously (in fixed substeps) across each
//! exchange interval. Commands from the software side arrive part-way
//! through an interval and take effect at the next substep boundary.

pub mod emulator;
pub mod hvac;
pub mod outdoor;
pub mod pid;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use emulator::{EmulatorParams, EmulatorReport, ZoneEmuState, ZoneEmulator, ZoneTarget};
pub use hvac::{HvacParams, HvacReport, HvacUnit, PvMode};
pub use outdoor::{Envelope, OutdoorCondition, OutdoorEmulator, OutdoorKind};
pub use pid::{Action, PidController, PidGains};

use crate::geb::SupervisorySetpoints;
use crate::psychro::{relative_humidity, CP_AIR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlantError {
    #[error("invalid plant parameter: {0}")]
    InvalidParameter(String),
}

/// Air leaving the HVAC unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DischargeAir {
    pub t_dis: f64,
    /// Humidity ratio, kg/kg.
    pub w_dis: f64,
    pub m_dot: f64,
}

impl DischargeAir {
    pub fn from_ratio(t_dis: f64, w_dis: f64, m_dot: f64) -> Self {
        Self { t_dis, w_dis, m_dot }
    }

    pub fn from_rh(t_dis: f64, rh_pct: f64, m_dot: f64) -> Self {
        Self::from_ratio(t_dis, crate::psychro::humidity_ratio(t_dis, rh_pct), m_dot)
    }

    pub fn rh_dis(&self) -> f64 {
        relative_humidity(self.t_dis, self.w_dis)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutdoorParams {
    pub tau_s: f64,
    pub envelope: Envelope,
    pub water_enabled: bool,
    pub water_tau_s: f64,
    pub water_envelope: Envelope,
    /// Ground-water schedule (constant).
    pub water_target_c: f64,
}

impl Default for OutdoorParams {
    fn default() -> Self {
        Self {
            tau_s: 120.0,
            envelope: Envelope::default_for(OutdoorKind::Air),
            water_enabled: true,
            water_tau_s: 120.0,
            water_envelope: Envelope::default_for(OutdoorKind::Water),
            water_target_c: 15.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantParams {
    pub pv_mode: PvMode,
    pub hvac: HvacParams,
    pub emulator: EmulatorParams,
    pub outdoor: OutdoorParams,
    /// Continuous-time integration substep, s. Must divide the step size.
    pub substep_s: f64,
    /// Resolution of the hardware logger clock, ms (0 = exact).
    pub hw_log_tick_ms: u64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            pv_mode: PvMode::default(),
            hvac: HvacParams::default(),
            emulator: EmulatorParams::default(),
            outdoor: OutdoorParams::default(),
            substep_s: 1.0,
            hw_log_tick_ms: 0,
        }
    }
}

/// Everything the software side sends down for one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantCommand {
    /// Simulated zone condition the emulator reproduces; `None` during a
    /// software outage.
    pub zone_target: Option<ZoneTarget>,
    pub setpoints: SupervisorySetpoints,
    pub outdoor_target: OutdoorCondition,
}

/// Plant state as published in the measure phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantSnapshot {
    pub zone: ZoneTarget,
    pub zone_rh_pct: f64,
    pub discharge: DischargeAir,
    pub outdoor: OutdoorCondition,
    pub water_t_c: Option<f64>,
    pub heater_w: f64,
    pub cooling_w: f64,
    pub humidifier_kgs: f64,
    pub hvac_cooling_w: f64,
    pub hvac_heating_w: f64,
    /// Sensible load the emulator air node sees from the discharge air.
    pub sensible_load_w: f64,
    pub applied: PlantCommand,
}

/// Event counts over one interval.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantReport {
    pub substeps: u32,
    pub emulator_saturated: u32,
    pub hvac_limited: u32,
    pub outdoor_limited: u32,
    pub water_limited: u32,
    pub stale_input: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plant {
    pub params: PlantParams,
    pub hvac: HvacUnit,
    pub emulator: ZoneEmulator,
    pub outdoor: OutdoorEmulator,
    pub water: Option<OutdoorEmulator>,
    applied: PlantCommand,
    last_target: ZoneTarget,
    hvac_cooling_w: f64,
    hvac_heating_w: f64,
}

impl Plant {
    pub fn new(params: PlantParams, initial: PlantCommand) -> Result<Self, PlantError> {
        if !(params.substep_s > 0.0 && params.substep_s.is_finite()) {
            return Err(PlantError::InvalidParameter("substep_s must be positive".into()));
        }
        let target = initial
            .zone_target
            .ok_or_else(|| PlantError::InvalidParameter("initial zone target required".into()))?;
        let discharge = DischargeAir::from_ratio(params.hvac.t_neutral, target.w, params.hvac.m_dot);
        let hvac = HvacUnit::new(params.hvac.clone(), discharge)?;
        let emulator = ZoneEmulator::new(params.emulator.clone(), target.t_c, target.w)?;
        let outdoor = OutdoorEmulator::new(
            OutdoorKind::Air,
            params.outdoor.envelope,
            params.outdoor.tau_s,
            initial.outdoor_target,
        )?;
        let water = if params.outdoor.water_enabled {
            Some(OutdoorEmulator::new(
                OutdoorKind::Water,
                params.outdoor.water_envelope,
                params.outdoor.water_tau_s,
                OutdoorCondition {
                    t_c: params.outdoor.water_target_c,
                    rh_pct: 0.0,
                },
            )?)
        } else {
            None
        };
        Ok(Self {
            params,
            hvac,
            emulator,
            outdoor,
            water,
            applied: initial,
            last_target: target,
            hvac_cooling_w: 0.0,
            hvac_heating_w: 0.0,
        })
    }

    pub fn applied(&self) -> &PlantCommand {
        &self.applied
    }

    pub fn snapshot(&self) -> PlantSnapshot {
        let s = &self.emulator.state;
        let d = self.hvac.discharge;
        PlantSnapshot {
            zone: ZoneTarget {
                t_c: s.t_emu,
                w: s.w_emu,
            },
            zone_rh_pct: relative_humidity(s.t_emu, s.w_emu),
            discharge: d,
            outdoor: self.outdoor.value,
            water_t_c: self.water.as_ref().map(|w| w.value.t_c),
            heater_w: s.heater_w,
            cooling_w: s.cooling_w,
            humidifier_kgs: s.humidifier_kgs,
            hvac_cooling_w: self.hvac_cooling_w,
            hvac_heating_w: self.hvac_heating_w,
            sensible_load_w: d.m_dot * CP_AIR * (s.t_emu - d.t_dis),
            applied: self.applied,
        }
    }

    fn apply(&mut self, cmd: PlantCommand) {
        if let Some(t) = cmd.zone_target {
            self.last_target = t;
        }
        self.applied = cmd;
    }

    /// Integrates the plant over `interval_s`.
    ///
    /// `switches` holds `(offset_s, command)` pairs sorted by offset; each
    /// command takes effect at the first substep boundary at or after its
    /// offset. Offsets at or beyond the interval end are applied at the end
    /// so they are in force for the next interval.
    pub fn advance(&mut self, interval_s: f64, switches: &[(f64, PlantCommand)]) -> PlantReport {
        let h = self.params.substep_s.min(interval_s);
        let n = (interval_s / h).round().max(1.0) as u32;
        let mut report = PlantReport::default();
        let mut pending = switches.iter().peekable();
        for k in 0..n {
            let t = f64::from(k) * h;
            while let Some((_, cmd)) = pending.next_if(|(off, _)| *off <= t + 1e-9) {
                self.apply(*cmd);
            }
            self.substep(h, &mut report);
        }
        for (_, cmd) in pending {
            self.apply(*cmd);
        }
        report
    }

    fn substep(&mut self, dt: f64, report: &mut PlantReport) {
        report.substeps += 1;
        let pv = match self.params.pv_mode {
            PvMode::Method1EmulatedPv => Some(self.emulator.state.t_emu),
            PvMode::Method2SimulatedPv => self.applied.zone_target.map(|z| z.t_c),
        };
        // Zero-order hold: the emulator sees the discharge at the start of
        // the substep; the HVAC unit then responds to the same PV sample.
        let discharge = self.hvac.discharge;
        let hv = self
            .hvac
            .step(pv, self.emulator.state.w_emu, &self.applied.setpoints, dt);
        if !hv.stale_input {
            self.hvac_cooling_w = hv.cooling_w;
            self.hvac_heating_w = hv.heating_w;
        }
        let em = self.emulator.step(self.last_target, &discharge, dt);
        let (_, out_lim) = self.outdoor.step(self.applied.outdoor_target, dt);
        let water_lim = match self.water.as_mut() {
            Some(w) => {
                let target = OutdoorCondition {
                    t_c: self.params.outdoor.water_target_c,
                    rh_pct: 0.0,
                };
                w.step(target, dt).1
            }
            None => false,
        };
        report.emulator_saturated += u32::from(em.saturated);
        report.hvac_limited += u32::from(hv.limited);
        report.stale_input += u32::from(hv.stale_input);
        report.outdoor_limited += u32::from(out_lim);
        report.water_limited += u32::from(water_lim);
    }
}
