//! Pluggable linear stand-in for a near-occupant airflow model.

use serde::{Deserialize, Serialize};

use crate::building::ZoneState;
use crate::plant::DischargeAir;
use crate::psychro::relative_humidity;

/// Axis-aligned zone box, m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZoneBounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Default for ZoneBounds {
    fn default() -> Self {
        Self {
            min: [0.0; 3],
            max: [10.0, 8.0, 3.0],
        }
    }
}

impl ZoneBounds {
    /// Clamps into the box; the flag is set when anything moved.
    pub fn clamp(&self, p: [f64; 3]) -> ([f64; 3], bool) {
        let mut out = p;
        for i in 0..3 {
            out[i] = p[i].clamp(self.min[i], self.max[i]);
        }
        (out, out != p)
    }
}

/// Mixing weights; they sum to one and are each non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weights {
    pub discharge: f64,
    pub zone: f64,
    pub surface: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightModel {
    /// Discharge weight decays with distance from the diffuser:
    /// `alpha0·exp(-d/lambda_m)`; the remainder splits between surfaces
    /// (`surface_share`) and zone air.
    Distance {
        alpha0: f64,
        lambda_m: f64,
        surface_share: f64,
        diffuser: [f64; 3],
    },
    Fixed(Weights),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NearOccupantSurrogate {
    pub bounds: ZoneBounds,
    pub model: WeightModel,
}

impl Default for NearOccupantSurrogate {
    fn default() -> Self {
        Self {
            bounds: ZoneBounds::default(),
            model: WeightModel::Distance {
                alpha0: 0.4,
                lambda_m: 2.0,
                surface_share: 0.3,
                diffuser: [5.0, 4.0, 3.0],
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCondition {
    /// Mixed air temperature at the occupant, °C.
    pub t_air_c: f64,
    /// Air temperature with personal device offsets applied, °C.
    pub effective_c: f64,
    pub rh_pct: f64,
    /// The coordinates were outside the zone and were clamped.
    pub clamped: bool,
}

impl NearOccupantSurrogate {
    pub fn validate(&self) -> Result<(), String> {
        for i in 0..3 {
            if !(self.bounds.min[i] <= self.bounds.max[i]) {
                return Err("bounds.min must not exceed bounds.max".into());
            }
        }
        match self.model {
            WeightModel::Distance {
                alpha0,
                lambda_m,
                surface_share,
                ..
            } => {
                if !(0.0..=1.0).contains(&alpha0) {
                    return Err("model.alpha0 must lie in [0, 1]".into());
                }
                if !(lambda_m > 0.0) {
                    return Err("model.lambda_m must be positive".into());
                }
                if !(0.0..=1.0).contains(&surface_share) {
                    return Err("model.surface_share must lie in [0, 1]".into());
                }
            }
            WeightModel::Fixed(w) => {
                let parts = [w.discharge, w.zone, w.surface];
                if parts.iter().any(|v| !(0.0..=1.0).contains(v)) || ((parts.iter().sum::<f64>() - 1.0).abs() > 1e-9) {
                    return Err("model weights must be in [0, 1] and sum to 1".into());
                }
            }
        }
        Ok(())
    }

    pub fn weights(&self, coords: [f64; 3]) -> Weights {
        match self.model {
            WeightModel::Fixed(w) => w,
            WeightModel::Distance {
                alpha0,
                lambda_m,
                surface_share,
                diffuser,
            } => {
                let d = (0..3).map(|i| (coords[i] - diffuser[i]).powi(2)).sum::<f64>().sqrt();
                let a = alpha0 * (-d / lambda_m).exp();
                let s = (1.0 - a) * surface_share;
                Weights {
                    discharge: a,
                    zone: 1.0 - a - s,
                    surface: s,
                }
            }
        }
    }

    /// Local condition at `coords` with device offsets (`fan_c`, `heater_c`)
    /// added to the effective temperature only.
    pub fn local_condition(
        &self,
        discharge: &DischargeAir,
        zone: &ZoneState,
        coords: [f64; 3],
        device_offset_c: f64,
    ) -> LocalCondition {
        let (p, clamped) = self.bounds.clamp(coords);
        let mut w = self.weights(p);
        let surface_mean = if zone.surface_temps.is_empty() {
            w.zone += w.surface;
            w.surface = 0.0;
            0.0
        } else {
            zone.surface_temps.iter().sum::<f64>() / zone.surface_temps.len() as f64
        };
        let mut t_air = w.discharge * discharge.t_dis + w.zone * zone.t_z + w.surface * surface_mean;
        // Guard the hull against rounding in the weighted sum.
        let mut lo = discharge.t_dis.min(zone.t_z);
        let mut hi = discharge.t_dis.max(zone.t_z);
        for &s in &zone.surface_temps {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        t_air = t_air.clamp(lo, hi);
        let a = w.discharge;
        let w_local = a * discharge.w_dis + (1.0 - a) * zone.w_z;
        LocalCondition {
            t_air_c: t_air,
            effective_c: t_air + device_offset_c,
            rh_pct: relative_humidity(t_air, w_local),
            clamped,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zone(t: f64, surfaces: Vec<f64>) -> ZoneState {
        ZoneState::new(t, 0.008, surfaces)
    }

    #[test]
    fn common_temperature_is_reproduced() {
        let s = NearOccupantSurrogate::default();
        let d = DischargeAir::from_ratio(22.0, 0.008, 0.5);
        let lc = s.local_condition(&d, &zone(22.0, vec![22.0, 22.0]), [1.0, 2.0, 1.1], 0.0);
        assert_eq!(lc.t_air_c, 22.0);
    }

    #[test]
    fn fixed_weights_arithmetic() {
        let s = NearOccupantSurrogate {
            model: WeightModel::Fixed(Weights {
                discharge: 0.3,
                zone: 0.7,
                surface: 0.0,
            }),
            ..NearOccupantSurrogate::default()
        };
        let d = DischargeAir::from_ratio(14.0, 0.008, 0.5);
        let lc = s.local_condition(&d, &zone(24.0, vec![]), [1.0, 1.0, 1.0], 0.0);
        assert!((lc.t_air_c - 21.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_bounds_coords_are_clamped_and_flagged() {
        let s = NearOccupantSurrogate::default();
        let d = DischargeAir::from_ratio(14.0, 0.008, 0.5);
        let inside = s.local_condition(&d, &zone(24.0, vec![24.0]), [10.0, 8.0, 3.0], 0.0);
        let outside = s.local_condition(&d, &zone(24.0, vec![24.0]), [50.0, 80.0, 30.0], 0.0);
        assert!(outside.clamped && !inside.clamped);
        assert_eq!(inside.t_air_c, outside.t_air_c);
    }

    #[test]
    fn fan_offset_lowers_effective_only() {
        let s = NearOccupantSurrogate::default();
        let d = DischargeAir::from_ratio(14.0, 0.008, 0.5);
        let lc = s.local_condition(&d, &zone(24.0, vec![24.0]), [1.0, 1.0, 1.0], -0.8);
        assert!((lc.effective_c - (lc.t_air_c - 0.8)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn local_temperature_is_convex(
            t_dis in 5.0..45.0f64, t_z in 5.0..45.0f64,
            surfaces in proptest::collection::vec(5.0..45.0f64, 0..4),
            x in -5.0..15.0f64, y in -5.0..15.0f64, zc in -1.0..4.0f64,
            alpha0 in 0.0..1.0f64, lambda in 0.1..10.0f64, share in 0.0..1.0f64,
        ) {
            let s = NearOccupantSurrogate {
                model: WeightModel::Distance { alpha0, lambda_m: lambda, surface_share: share, diffuser: [5.0, 4.0, 3.0] },
                ..NearOccupantSurrogate::default()
            };
            let d = DischargeAir::from_ratio(t_dis, 0.008, 0.5);
            let z = zone(t_z, surfaces.clone());
            let lc = s.local_condition(&d, &z, [x, y, zc], 0.0);
            let lo = surfaces.iter().copied().fold(t_dis.min(t_z), f64::min);
            let hi = surfaces.iter().copied().fold(t_dis.max(t_z), f64::max);
            prop_assert!(lc.t_air_c >= lo && lc.t_air_c <= hi);
            let w = s.weights([x, y, zc]);
            prop_assert!(w.discharge >= 0.0 && w.zone >= -1e-15 && w.surface >= 0.0);
            prop_assert!((w.discharge + w.zone + w.surface - 1.0).abs() < 1e-12);
        }
    }
}
