//! Duct-built zone emulator: one well-mixed air node heated by an electric
//! heater, cooled by a coil, humidified by a steam spray, with an internal
//! mass lumped into the node capacitance.

use serde::{Deserialize, Serialize};

use super::pid::{PidController, PidGains};
use super::{DischargeAir, PlantError};
use crate::psychro::CP_AIR;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmulatorParams {
    /// Air node plus internal mass capacitance, J/K.
    pub c_emu: f64,
    /// Moisture capacitance expressed as an equivalent dry-air mass, kg.
    pub air_mass_kg: f64,
    pub heater_rated_w: f64,
    pub cooling_rated_w: f64,
    pub humidifier_rated_kgs: f64,
    /// Temperature loop, output in [-1, 1]: positive heats, negative cools.
    pub temp_pid: PidGains,
    /// Humidity loop on humidity ratio, output in [0, 1].
    pub hum_pid: PidGains,
    /// Perfect emulation: the air node snaps to its target.
    pub ideal: bool,
}

impl Default for EmulatorParams {
    fn default() -> Self {
        Self {
            c_emu: 50_000.0,
            air_mass_kg: 50.0,
            heater_rated_w: 8_000.0,
            cooling_rated_w: 4_000.0,
            humidifier_rated_kgs: 0.002,
            temp_pid: PidGains::new(0.5, 0.02, 0.0).limits(-1.0, 1.0),
            hum_pid: PidGains::new(200.0, 5.0, 0.0).limits(0.0, 1.0),
            ideal: false,
        }
    }
}

/// Plant-side emulated zone condition and the coil commands producing it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneEmuState {
    pub t_emu: f64,
    pub w_emu: f64,
    pub c_emu: f64,
    pub heater_w: f64,
    pub cooling_w: f64,
    pub humidifier_kgs: f64,
}

/// Condition the emulator is asked to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneTarget {
    pub t_c: f64,
    pub w: f64,
}

/// Side information from one emulator update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EmulatorReport {
    /// A coil or humidifier command hit its rated capacity.
    pub saturated: bool,
    /// Net heat into the air node over the interval, J.
    pub heat_in_j: f64,
}

/// Exact solution of `c·dT/dt = q + g·(t_src - T)` over `dt` with inputs held.
///
/// Returns the end temperature and the integral of the right-hand side
/// (net heat in, J). With `g = 0` this is pure accumulation.
pub(crate) fn exact_node_update(t0: f64, c: f64, q: f64, g: f64, t_src: f64, dt: f64) -> (f64, f64) {
    if g <= 0.0 {
        let t1 = t0 + q * dt / c;
        return (t1, q * dt);
    }
    let t_eq = t_src + q / g;
    let decay = (-g * dt / c).exp();
    let t1 = t_eq + (t0 - t_eq) * decay;
    (t1, c * (t1 - t0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneEmulator {
    pub params: EmulatorParams,
    pub state: ZoneEmuState,
    temp_pid: PidController,
    hum_pid: PidController,
}

impl ZoneEmulator {
    pub fn new(params: EmulatorParams, t0: f64, w0: f64) -> Result<Self, PlantError> {
        if !(params.c_emu > 0.0 && params.c_emu.is_finite()) {
            return Err(PlantError::InvalidParameter("c_emu must be positive".into()));
        }
        if params.air_mass_kg <= 0.0 {
            return Err(PlantError::InvalidParameter("air_mass_kg must be positive".into()));
        }
        if params.heater_rated_w < 0.0 || params.cooling_rated_w < 0.0 || params.humidifier_rated_kgs < 0.0 {
            return Err(PlantError::InvalidParameter(
                "rated capacities must be non-negative".into(),
            ));
        }
        let temp_pid = PidController::new(params.temp_pid.limits(-1.0, 1.0));
        let hum_pid = PidController::new(params.hum_pid.limits(0.0, 1.0));
        Ok(Self {
            state: ZoneEmuState {
                t_emu: t0,
                w_emu: w0,
                c_emu: params.c_emu,
                heater_w: 0.0,
                cooling_w: 0.0,
                humidifier_kgs: 0.0,
            },
            params,
            temp_pid,
            hum_pid,
        })
    }

    pub fn integral_states(&self) -> (f64, f64) {
        (self.temp_pid.integral, self.hum_pid.integral)
    }

    /// Advances the emulated zone by `dt` toward `target` with the HVAC
    /// discharge air held constant.
    ///
    /// Loop commands are computed at the start of the interval and held
    /// (zero-order hold); the air node is then integrated exactly.
    pub fn step(&mut self, target: ZoneTarget, discharge: &DischargeAir, dt: f64) -> EmulatorReport {
        let p = &self.params;
        if p.ideal {
            let heat = self.state.c_emu * (target.t_c - self.state.t_emu);
            self.state.t_emu = target.t_c;
            self.state.w_emu = target.w;
            return EmulatorReport {
                saturated: false,
                heat_in_j: heat,
            };
        }
        let u = self.temp_pid.step(target.t_c, self.state.t_emu, dt);
        let v = self.hum_pid.step(target.w, self.state.w_emu, dt);
        let heater = u.max(0.0) * p.heater_rated_w;
        let cooling = (-u).max(0.0) * p.cooling_rated_w;
        let humid = v * p.humidifier_rated_kgs;
        let saturated = self.temp_pid.saturated() && u != 0.0 || v >= 1.0;

        let g = discharge.m_dot * CP_AIR;
        let (t1, heat) = exact_node_update(
            self.state.t_emu,
            self.state.c_emu,
            heater - cooling,
            g,
            discharge.t_dis,
            dt,
        );
        let (w1, _) = exact_node_update(
            self.state.w_emu,
            p.air_mass_kg,
            humid,
            discharge.m_dot,
            discharge.w_dis,
            dt,
        );
        self.state.t_emu = t1;
        self.state.w_emu = w1.max(0.0);
        self.state.heater_w = heater;
        self.state.cooling_w = cooling;
        self.state.humidifier_kgs = humid;
        EmulatorReport {
            saturated,
            heat_in_j: heat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neutral(t: f64, w: f64, m_dot: f64) -> DischargeAir {
        DischargeAir::from_ratio(t, w, m_dot)
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let mut emu = ZoneEmulator::new(EmulatorParams::default(), 22.0, 0.008).unwrap();
        let before = emu.state.clone();
        let r = emu.step(ZoneTarget { t_c: 22.0, w: 0.008 }, &neutral(22.0, 0.008, 0.5), 60.0);
        assert_eq!(emu.state, before);
        assert_eq!(r.heat_in_j, 0.0);
    }

    #[test]
    fn heater_only_accumulates_q_dt_over_c() {
        // A 1 °C error with kp = 1 saturates the loop at +1, i.e. the full
        // 500 W heater rating, with no airflow through the node.
        let params = EmulatorParams {
            c_emu: 5000.0,
            heater_rated_w: 500.0,
            temp_pid: PidGains::new(1.0, 0.0, 0.0),
            ..EmulatorParams::default()
        };
        let mut emu = ZoneEmulator::new(params, 20.0, 0.008).unwrap();
        emu.step(ZoneTarget { t_c: 21.0, w: 0.008 }, &neutral(20.0, 0.008, 0.0), 60.0);
        assert_eq!(emu.state.heater_w, 500.0);
        assert!((emu.state.t_emu - 26.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_capacitance() {
        let params = EmulatorParams {
            c_emu: 0.0,
            ..EmulatorParams::default()
        };
        assert!(ZoneEmulator::new(params, 20.0, 0.008).is_err());
    }

    #[test]
    fn ideal_mode_snaps_to_target() {
        let params = EmulatorParams {
            ideal: true,
            ..EmulatorParams::default()
        };
        let mut emu = ZoneEmulator::new(params, 20.0, 0.008).unwrap();
        emu.step(ZoneTarget { t_c: 23.5, w: 0.009 }, &neutral(14.0, 0.008, 0.5), 60.0);
        assert_eq!(emu.state.t_emu, 23.5);
        assert_eq!(emu.state.w_emu, 0.009);
    }

    #[test]
    fn commands_stay_within_rating_and_flag_saturation() {
        let mut emu = ZoneEmulator::new(EmulatorParams::default(), 10.0, 0.002).unwrap();
        let r = emu.step(ZoneTarget { t_c: 40.0, w: 0.02 }, &neutral(10.0, 0.002, 0.5), 1.0);
        assert!(r.saturated);
        assert!(emu.state.heater_w <= emu.params.heater_rated_w);
        assert!(emu.state.humidifier_kgs <= emu.params.humidifier_rated_kgs);
    }
}
