//! Names of every logged variable.
//!
//! Exchanged quantities share one name across sources: the plant publishes
//! `name:emulated`, the software side `name:simulated`, and the setpoint
//! the plant was operating on at measurement time is `name:setpoint`.
//! Hardware-internal quantities live under `plant.`; the hardware's log of
//! received results lives under `plant.rx.`.

use crate::datastore::{DataStore, Source, StoreError, VariableKey};

pub const ZONE_T: &str = "zone.T";
pub const ZONE_RH: &str = "zone.rh";
pub const DIS_T: &str = "dis.T";
pub const DIS_RH: &str = "dis.rh";
pub const DIS_MDOT: &str = "dis.mdot";
pub const OUT_T: &str = "out.T";
pub const OUT_RH: &str = "out.rh";
pub const WATER_T: &str = "water.T";
pub const CLG_SPT: &str = "ctrl.clg_spt";
pub const HTG_SPT: &str = "ctrl.htg_spt";
pub const DAT_SPT: &str = "ctrl.dat_spt";
pub const LOAD_SENSIBLE: &str = "load.sensible";
pub const LOAD_LATENT: &str = "load.latent";

pub const SURFACE_T: &str = "bldg.surface.T";

pub const HEATER_W: &str = "plant.heater_w";
pub const COOLING_W: &str = "plant.cooling_w";
pub const HUMIDIFIER: &str = "plant.humidifier_kgs";
pub const HVAC_COOLING_W: &str = "plant.hvac_cooling_w";
pub const HVAC_HEATING_W: &str = "plant.hvac_heating_w";
pub const SATURATED: &str = "plant.saturated";
pub const LIMITED: &str = "plant.limited";
pub const STALE: &str = "plant.stale";

pub const RX_STEP: &str = "plant.rx.step";
pub const RX_ZONE_T: &str = "plant.rx.zone.T";
pub const RX_CLG_SPT: &str = "plant.rx.ctrl.clg_spt";

pub const OCC_SENSIBLE: &str = "occ.sensible_w";
pub const OCC_LATENT: &str = "occ.latent_w";
pub const OCC_THERMOSTAT: &str = "occ.thermostat_delta";
pub const OCC_ACTIONS: &str = "occ.actions";
pub const OCC_DISCOMFORT: &str = "occ.discomfort_mean";

pub const GEB_ACTIVE: &str = "geb.active";
pub const GEB_CLAMPED: &str = "geb.clamped";
pub const GEB_SLOW_AGE: &str = "geb.slow_age";

/// Variables that cross the plant/software boundary; never excludable.
pub const EXCHANGED: [&str; 13] = [
    ZONE_T,
    ZONE_RH,
    DIS_T,
    DIS_RH,
    DIS_MDOT,
    OUT_T,
    OUT_RH,
    WATER_T,
    CLG_SPT,
    HTG_SPT,
    DAT_SPT,
    LOAD_SENSIBLE,
    LOAD_LATENT,
];

/// `(name, source, unit)` for every variable a run may log.
pub fn catalog(water: bool) -> Vec<(&'static str, Source, &'static str)> {
    use Source::{Emulated as E, Setpoint as P, Simulated as S};
    let mut v = vec![
        (ZONE_T, E, "degC"),
        (ZONE_RH, E, "pct"),
        (DIS_T, E, "degC"),
        (DIS_RH, E, "pct"),
        (DIS_MDOT, E, "kg/s"),
        (OUT_T, E, "degC"),
        (OUT_RH, E, "pct"),
        (LOAD_SENSIBLE, E, "W"),
        (HEATER_W, E, "W"),
        (COOLING_W, E, "W"),
        (HUMIDIFIER, E, "kg/s"),
        (HVAC_COOLING_W, E, "W"),
        (HVAC_HEATING_W, E, "W"),
        (SATURATED, E, "count"),
        (LIMITED, E, "count"),
        (STALE, E, "count"),
        (ZONE_T, P, "degC"),
        (ZONE_RH, P, "pct"),
        (OUT_T, P, "degC"),
        (OUT_RH, P, "pct"),
        (CLG_SPT, P, "degC"),
        (HTG_SPT, P, "degC"),
        (DAT_SPT, P, "degC"),
        (RX_STEP, P, "step"),
        (RX_ZONE_T, P, "degC"),
        (RX_CLG_SPT, P, "degC"),
        (ZONE_T, S, "degC"),
        (ZONE_RH, S, "pct"),
        (SURFACE_T, S, "degC"),
        (DIS_T, S, "degC"),
        (OUT_T, S, "degC"),
        (OUT_RH, S, "pct"),
        (LOAD_SENSIBLE, S, "W"),
        (LOAD_LATENT, S, "W"),
        (CLG_SPT, S, "degC"),
        (HTG_SPT, S, "degC"),
        (DAT_SPT, S, "degC"),
        (OCC_SENSIBLE, S, "W"),
        (OCC_LATENT, S, "W"),
        (OCC_THERMOSTAT, S, "degC"),
        (OCC_ACTIONS, S, "count"),
        (OCC_DISCOMFORT, S, "degC"),
        (GEB_ACTIVE, S, "flag"),
        (GEB_CLAMPED, S, "flag"),
        (GEB_SLOW_AGE, S, "step"),
    ];
    if water {
        v.push((WATER_T, E, "degC"));
    }
    v
}

/// Registers the catalog minus excluded prefixes.
pub fn register_all(store: &DataStore, water: bool, exclude: &[String]) -> Result<(), StoreError> {
    for (name, source, unit) in catalog(water) {
        let excluded = !EXCHANGED.contains(&name) && exclude.iter().any(|p| name.starts_with(p.as_str()));
        if !excluded {
            store.register(VariableKey::new(name, source, unit)?)?;
        }
    }
    Ok(())
}
