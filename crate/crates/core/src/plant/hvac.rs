//! Constant-volume HVAC unit with zone-temperature control.
//!
//! A reverse-acting cooling loop (on the cooling setpoint) and a
//! direct-acting heating loop (on the heating setpoint) each produce a
//! capacity fraction. Net capacity sets a discharge temperature target
//! relative to the neutral supply temperature; the actual discharge
//! temperature follows the target through a first-order actuator lag.

use serde::{Deserialize, Serialize};

use super::pid::{PidController, PidGains};
use super::{DischargeAir, PlantError};
use crate::geb::SupervisorySetpoints;
use crate::psychro::{saturation_humidity_ratio, CP_AIR};

/// Which zone temperature the HVAC zone loop regulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PvMode {
    /// Emulated zone temperature (tight coupling with the emulator).
    Method1EmulatedPv,
    /// Simulated zone temperature from the virtual building.
    #[default]
    Method2SimulatedPv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HvacParams {
    pub m_dot: f64,
    /// Discharge temperature with both loops idle, °C.
    pub t_neutral: f64,
    pub t_dis_min: f64,
    pub t_dis_max: f64,
    pub cooling_rated_w: f64,
    pub heating_rated_w: f64,
    /// Discharge temperature actuator time constant, s (0 = instantaneous).
    pub actuator_tau_s: f64,
    /// Update period of the digital zone controller, s. Capacity commands
    /// are held between updates; 0 updates on every substep.
    pub control_interval_s: f64,
    pub cool_pid: PidGains,
    pub heat_pid: PidGains,
}

impl Default for HvacParams {
    fn default() -> Self {
        Self {
            m_dot: 0.5,
            t_neutral: 20.0,
            t_dis_min: 12.0,
            t_dis_max: 40.0,
            cooling_rated_w: 5_000.0,
            heating_rated_w: 5_000.0,
            actuator_tau_s: 60.0,
            control_interval_s: 0.0,
            cool_pid: PidGains::new(0.5, 0.002, 0.0),
            heat_pid: PidGains::new(0.5, 0.002, 0.0),
        }
    }
}

/// Side information from one HVAC update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HvacReport {
    /// Method 2 was selected but no simulated PV was available.
    pub stale_input: bool,
    /// The discharge target hit an equipment temperature limit.
    pub limited: bool,
    pub cooling_w: f64,
    pub heating_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvacUnit {
    pub params: HvacParams,
    pub discharge: DischargeAir,
    cool_pid: PidController,
    heat_pid: PidController,
    /// Capacity fractions held since the last controller update.
    held: (f64, f64),
    /// Time since the last controller update; 0 means an update is due.
    since_update_s: f64,
}

impl HvacUnit {
    pub fn new(params: HvacParams, initial: DischargeAir) -> Result<Self, PlantError> {
        if params.m_dot < 0.0 {
            return Err(PlantError::InvalidParameter("m_dot must be non-negative".into()));
        }
        if params.t_dis_min >= params.t_dis_max {
            return Err(PlantError::InvalidParameter("t_dis_min must be below t_dis_max".into()));
        }
        if params.actuator_tau_s < 0.0 {
            return Err(PlantError::InvalidParameter(
                "actuator_tau_s must be non-negative".into(),
            ));
        }
        if !(params.control_interval_s >= 0.0 && params.control_interval_s.is_finite()) {
            return Err(PlantError::InvalidParameter(
                "control_interval_s must be non-negative".into(),
            ));
        }
        let cool_pid = PidController::new(params.cool_pid.limits(0.0, 1.0).reverse());
        let heat_pid = PidController::new(PidGains {
            action: super::pid::Action::Direct,
            ..params.heat_pid.limits(0.0, 1.0)
        });
        Ok(Self {
            params,
            discharge: initial,
            cool_pid,
            heat_pid,
            held: (0.0, 0.0),
            since_update_s: 0.0,
        })
    }

    pub fn integral_states(&self) -> (f64, f64) {
        (self.cool_pid.integral, self.heat_pid.integral)
    }

    /// Advances the unit by `dt`.
    ///
    /// `pv` is the zone temperature selected by the caller according to the
    /// active [`PvMode`]; `None` means the selected source is unavailable,
    /// in which case the last discharge condition is held and the report
    /// carries `stale_input`. `return_w` is the humidity ratio of the air
    /// entering the coil.
    pub fn step(&mut self, pv: Option<f64>, return_w: f64, spt: &SupervisorySetpoints, dt: f64) -> HvacReport {
        let Some(pv) = pv else {
            return HvacReport {
                stale_input: true,
                ..HvacReport::default()
            };
        };
        let p = &self.params;
        let interval = p.control_interval_s;
        if self.since_update_s == 0.0 {
            let period = if interval > 0.0 { interval } else { dt };
            self.held = (
                self.cool_pid.step(spt.cooling_c, pv, period),
                self.heat_pid.step(spt.heating_c, pv, period),
            );
        }
        self.since_update_s += dt;
        if self.since_update_s >= interval - 1e-9 {
            self.since_update_s = 0.0;
        }
        let (c, h) = self.held;
        let cooling = c * p.cooling_rated_w;
        let heating = h * p.heating_rated_w;
        let lower = p.t_dis_min.max(spt.discharge_c.min(p.t_neutral));
        let raw_target = if p.m_dot > 0.0 {
            p.t_neutral + (heating - cooling) / (p.m_dot * CP_AIR)
        } else {
            p.t_neutral
        };
        let target = raw_target.clamp(lower, p.t_dis_max);
        let decay = if p.actuator_tau_s > 0.0 {
            (-dt / p.actuator_tau_s).exp()
        } else {
            0.0
        };
        let t_dis = target + (self.discharge.t_dis - target) * decay;
        let w_dis = return_w.min(saturation_humidity_ratio(t_dis));
        self.discharge = DischargeAir::from_ratio(t_dis, w_dis, p.m_dot);
        HvacReport {
            stale_input: false,
            limited: raw_target != target,
            cooling_w: cooling,
            heating_w: heating,
        }
    }
}
