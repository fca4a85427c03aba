use serde::{Deserialize, Serialize};

use super::BuildingError;
use crate::occupants::OccupantGains;
use crate::plant::emulator::exact_node_update;
use crate::plant::{DischargeAir, OutdoorCondition};
use crate::psychro::{humidity_ratio, relative_humidity, saturation_humidity_ratio, CP_AIR, H_FG};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZoneParams {
    /// Zone air plus furnishings capacitance, J/K.
    pub c_z: f64,
    /// Envelope conductance, W/K.
    pub ua: f64,
    /// Moisture capacitance as an equivalent dry-air mass, kg.
    pub c_w_kg: f64,
    /// Outdoor air exchange carrying moisture, kg/s.
    pub infiltration_kgs: f64,
    /// Sensible internal gains per step, W; the last entry is held.
    pub internal_gain_w: Vec<f64>,
    /// Latent internal gains, W.
    pub internal_latent_w: f64,
    pub surface_tau_s: f64,
    pub surface_count: usize,
    pub initial_t_c: f64,
    pub initial_rh_pct: f64,
}

impl Default for ZoneParams {
    fn default() -> Self {
        Self {
            c_z: 2.0e6,
            ua: 150.0,
            c_w_kg: 400.0,
            infiltration_kgs: 0.02,
            internal_gain_w: vec![1500.0],
            internal_latent_w: 150.0,
            surface_tau_s: 1800.0,
            surface_count: 2,
            initial_t_c: 24.0,
            initial_rh_pct: 50.0,
        }
    }
}

impl ZoneParams {
    pub fn validate(&self) -> Result<(), BuildingError> {
        let bad = |f: &str, r: &str| Err(BuildingError::InvalidParameter(format!("{f}: {r}")));
        if !(self.c_z > 0.0 && self.c_z.is_finite()) {
            return bad("c_z", "must be positive");
        }
        if !(self.ua >= 0.0 && self.ua.is_finite()) {
            return bad("ua", "must be non-negative");
        }
        if !(self.c_w_kg > 0.0 && self.c_w_kg.is_finite()) {
            return bad("c_w_kg", "must be positive");
        }
        if !(self.infiltration_kgs >= 0.0) {
            return bad("infiltration_kgs", "must be non-negative");
        }
        if !(self.surface_tau_s >= 0.0) {
            return bad("surface_tau_s", "must be non-negative");
        }
        if self.internal_gain_w.iter().any(|g| !g.is_finite()) || !self.internal_latent_w.is_finite() {
            return bad("internal_gain_w", "must be finite");
        }
        if !(0.0..=100.0).contains(&self.initial_rh_pct) {
            return bad("initial_rh_pct", "must lie in [0, 100]");
        }
        Ok(())
    }

    pub fn internal_gain_at(&self, step: u64) -> f64 {
        match self.internal_gain_w.len() {
            0 => 0.0,
            n => self.internal_gain_w[(step as usize).min(n - 1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneState {
    pub t_z: f64,
    pub rh_z: f64,
    pub w_z: f64,
    pub surface_temps: Vec<f64>,
}

impl ZoneState {
    /// Builds a consistent state, capping humidity at saturation.
    pub fn new(t_z: f64, w_z: f64, surface_temps: Vec<f64>) -> Self {
        let w_z = w_z.clamp(0.0, saturation_humidity_ratio(t_z));
        Self {
            t_z,
            rh_z: relative_humidity(t_z, w_z),
            w_z,
            surface_temps,
        }
    }
}

/// Single-node RC zone with an optional one-step discharge input delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneModel {
    pub params: ZoneParams,
    pub inherited_delay: bool,
    /// Previous step's discharge; consumed instead of the current one when
    /// `inherited_delay` is on.
    pub delay_buffer: DischargeAir,
    pub state: ZoneState,
    /// Completed `zone_step` calls.
    pub steps: u64,
}

impl ZoneModel {
    pub fn new(
        params: ZoneParams,
        inherited_delay: bool,
        initial_discharge: DischargeAir,
    ) -> Result<Self, BuildingError> {
        params.validate()?;
        let t0 = params.initial_t_c;
        let w0 = humidity_ratio(t0, params.initial_rh_pct);
        let state = ZoneState::new(t0, w0, vec![t0; params.surface_count]);
        Ok(Self {
            params,
            inherited_delay,
            delay_buffer: initial_discharge,
            state,
            steps: 0,
        })
    }

    /// Advances the zone one step of `dt` seconds with inputs held.
    ///
    /// Returns the discharge condition actually used, which differs from
    /// `discharge` when the inherited delay is on.
    pub fn zone_step(
        &mut self,
        discharge: DischargeAir,
        out: &OutdoorCondition,
        gains: &OccupantGains,
        dt: f64,
    ) -> Result<DischargeAir, BuildingError> {
        let finite = [
            discharge.t_dis,
            discharge.w_dis,
            discharge.m_dot,
            out.t_c,
            out.rh_pct,
            gains.sensible_w,
            gains.latent_w,
            dt,
        ];
        if finite.iter().any(|v| !v.is_finite()) || dt <= 0.0 {
            return Err(BuildingError::NonFiniteInput { step: self.steps });
        }
        let effective = if self.inherited_delay {
            std::mem::replace(&mut self.delay_buffer, discharge)
        } else {
            discharge
        };
        let p = &self.params;
        let s = &self.state;
        let g_air = effective.m_dot * CP_AIR;
        let g = g_air + p.ua;
        let t_src = if g > 0.0 {
            (g_air * effective.t_dis + p.ua * out.t_c) / g
        } else {
            s.t_z
        };
        let q = p.internal_gain_at(self.steps) + gains.sensible_w;
        let (t1, _) = exact_node_update(s.t_z, p.c_z, q, g, t_src, dt);

        let w_out = humidity_ratio(out.t_c, out.rh_pct);
        let gm = effective.m_dot + p.infiltration_kgs;
        let w_src = if gm > 0.0 {
            (effective.m_dot * effective.w_dis + p.infiltration_kgs * w_out) / gm
        } else {
            s.w_z
        };
        let qm = (p.internal_latent_w + gains.latent_w) / H_FG;
        let (w1, _) = exact_node_update(s.w_z, p.c_w_kg, qm, gm, w_src, dt);

        let decay = if p.surface_tau_s > 0.0 {
            (-dt / p.surface_tau_s).exp()
        } else {
            0.0
        };
        let surfaces = s.surface_temps.iter().map(|&ts| t1 + (ts - t1) * decay).collect();
        self.state = ZoneState::new(t1, w1, surfaces);
        self.steps += 1;
        Ok(effective)
    }
}

/// Load the discharge air removes from the zone: (sensible W, latent W).
pub fn compute_zone_load(state: &ZoneState, discharge: &DischargeAir) -> (f64, f64) {
    let sensible = discharge.m_dot * CP_AIR * (state.t_z - discharge.t_dis);
    let latent = discharge.m_dot * (state.w_z - discharge.w_dis) * H_FG;
    (sensible, latent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dis(t: f64, m: f64) -> DischargeAir {
        DischargeAir::from_ratio(t, 0.008, m)
    }

    fn out(t: f64) -> OutdoorCondition {
        OutdoorCondition { t_c: t, rh_pct: 40.0 }
    }

    fn quiet() -> ZoneParams {
        ZoneParams {
            internal_gain_w: vec![0.0],
            internal_latent_w: 0.0,
            ..ZoneParams::default()
        }
    }

    #[test]
    fn adiabatic_zone_holds_temperature() {
        let params = ZoneParams { ua: 0.0, ..quiet() };
        let mut z = ZoneModel::new(params, false, dis(13.0, 0.0)).unwrap();
        for _ in 0..100 {
            z.zone_step(dis(13.0, 0.0), &out(35.0), &OccupantGains::default(), 60.0)
                .unwrap();
        }
        assert_eq!(z.state.t_z, 24.0);
    }

    #[test]
    fn converges_to_analytic_equilibrium() {
        let params = ZoneParams {
            internal_gain_w: vec![2000.0],
            ..quiet()
        };
        let mut z = ZoneModel::new(params.clone(), false, dis(14.0, 0.5)).unwrap();
        for _ in 0..5000 {
            z.zone_step(dis(14.0, 0.5), &out(32.0), &OccupantGains::default(), 60.0)
                .unwrap();
        }
        let g = 0.5 * CP_AIR;
        let want = (g * 14.0 + params.ua * 32.0 + 2000.0) / (g + params.ua);
        assert!((z.state.t_z - want).abs() < 1e-9, "{} vs {want}", z.state.t_z);
    }

    #[test]
    fn inherited_delay_shifts_response_one_step() {
        let run = |delay: bool| {
            let mut z = ZoneModel::new(quiet(), delay, dis(24.0, 0.5)).unwrap();
            let mut trace = Vec::new();
            for n in 0..6 {
                let t_dis = if n >= 3 { 12.0 } else { 24.0 };
                z.zone_step(dis(t_dis, 0.5), &out(24.0), &OccupantGains::default(), 60.0)
                    .unwrap();
                trace.push(z.state.t_z);
            }
            trace
        };
        let (off, on) = (run(false), run(true));
        // Step at n = 3: without delay the zone already cools over step 3,
        // with the delay it first responds over step 4.
        assert!(off[3] < off[2]);
        assert_eq!(on[3], on[2]);
        assert!(on[4] < on[3]);
    }

    #[test]
    fn zone_load_arithmetic() {
        let s = ZoneState::new(24.0, 0.008, vec![]);
        assert_eq!(compute_zone_load(&s, &dis(24.0, 0.5)).0, 0.0);
        let (sens, lat) = compute_zone_load(&s, &dis(14.0, 0.5));
        assert!((sens - 5030.0).abs() < 1e-9);
        assert_eq!(lat, 0.0);
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut z = ZoneModel::new(quiet(), false, dis(20.0, 0.5)).unwrap();
        let r = z.zone_step(dis(f64::NAN, 0.5), &out(24.0), &OccupantGains::default(), 60.0);
        assert!(r.is_err());
        assert_eq!(z.steps, 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let params = ZoneParams {
            c_z: 0.0,
            ..ZoneParams::default()
        };
        assert!(ZoneModel::new(params, false, dis(20.0, 0.5)).is_err());
        let params = ZoneParams {
            ua: -1.0,
            ..ZoneParams::default()
        };
        assert!(ZoneModel::new(params, false, dis(20.0, 0.5)).is_err());
    }

    proptest! {
        #[test]
        fn delay_equals_shifted_input_series(
            seq in proptest::collection::vec((10.0..30.0f64, 0.0..1.0f64, -5.0..40.0f64), 1..60),
        ) {
            let init = dis(18.0, 0.4);
            let mut on = ZoneModel::new(ZoneParams::default(), true, init).unwrap();
            let mut off = ZoneModel::new(ZoneParams::default(), false, init).unwrap();
            let mut prev = init;
            for (t, m, to) in seq {
                let d = dis(t, m);
                on.zone_step(d, &out(to), &OccupantGains::default(), 60.0).unwrap();
                off.zone_step(prev, &out(to), &OccupantGains::default(), 60.0).unwrap();
                prev = d;
                prop_assert_eq!(&on.state, &off.state);
            }
        }

        #[test]
        fn emitted_state_is_psychrometrically_consistent(
            seq in proptest::collection::vec((10.0..30.0f64, 0.0..0.03f64, 0.0..1.0f64), 1..40),
        ) {
            let mut z = ZoneModel::new(ZoneParams::default(), false, dis(18.0, 0.4)).unwrap();
            for (t, w, m) in seq {
                z.zone_step(DischargeAir::from_ratio(t, w, m), &out(30.0), &OccupantGains::default(), 60.0).unwrap();
                let s = &z.state;
                prop_assert!((0.0..=100.0).contains(&s.rh_z));
                prop_assert!((relative_humidity(s.t_z, s.w_z) - s.rh_z).abs() < 1e-9);
            }
        }
    }
}
