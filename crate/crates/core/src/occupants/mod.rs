//! Agent-based occupant comfort and adaptive behavior.
//!
//! Each step every agent reads its local condition from the surrogate,
//! scores its discomfort against a temperature band, and may take any
//! applicable adaptive actions. Actions feed back to the zone as
//! sensible/latent gains and a thermostat offset.

mod agent;
mod surrogate;

use serde::{Deserialize, Serialize};

pub use agent::{behave, comfort_eval, ActionProbs, ActionType, DiscomfortScore, OccupantAgent};
pub use surrogate::{LocalCondition, NearOccupantSurrogate, WeightModel, Weights, ZoneBounds};

use crate::building::ZoneState;
use crate::exec::Execution;
use crate::plant::DischargeAir;
use crate::rng::{substream, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSpec {
    pub id: u32,
    pub coords: [f64; 3],
    pub clo: f64,
    pub clo_min: f64,
    pub clo_max: f64,
    pub t_pref_c: f64,
    pub deadband_c: f64,
    pub probs: ActionProbs,
}

impl Default for AgentSpec {
    fn default() -> Self {
        Self {
            id: 0,
            coords: [2.0, 2.0, 1.1],
            clo: 0.7,
            clo_min: 0.3,
            clo_max: 1.5,
            t_pref_c: 23.0,
            deadband_c: 1.0,
            probs: ActionProbs::default(),
        }
    }
}

/// Effect magnitudes, °C unless noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComfortOffsets {
    pub fan_c: f64,
    pub heater_c: f64,
    /// Perceived-temperature change per clo above the agent's initial clo.
    pub clo_c_per_clo: f64,
    pub clo_step: f64,
    /// Initial magnitude of a hot (+) or cold (-) drink, decaying linearly.
    pub drink_c: f64,
    pub drink_duration_s: f64,
    pub walk_c: f64,
    pub walk_duration_s: f64,
    pub thermostat_step_c: f64,
}

impl Default for ComfortOffsets {
    fn default() -> Self {
        Self {
            fan_c: -0.8,
            heater_c: 1.0,
            clo_c_per_clo: 2.0,
            clo_step: 0.5,
            drink_c: 0.5,
            drink_duration_s: 900.0,
            walk_c: 0.3,
            walk_duration_s: 300.0,
            thermostat_step_c: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceRatings {
    pub heater_w: f64,
    pub base_sensible_w: f64,
    pub base_latent_w: f64,
    pub walk_extra_w: f64,
}

impl Default for DeviceRatings {
    fn default() -> Self {
        Self {
            heater_w: 800.0,
            base_sensible_w: 75.0,
            base_latent_w: 55.0,
            walk_extra_w: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OccupantParams {
    pub agents: Vec<AgentSpec>,
    pub surrogate: NearOccupantSurrogate,
    pub offsets: ComfortOffsets,
    pub devices: DeviceRatings,
    /// Aggregate thermostat offset is clamped to ±this.
    pub thermostat_band_c: f64,
}

impl Default for OccupantParams {
    fn default() -> Self {
        Self {
            agents: Vec::new(),
            surrogate: NearOccupantSurrogate::default(),
            offsets: ComfortOffsets::default(),
            devices: DeviceRatings::default(),
            thermostat_band_c: 2.0,
        }
    }
}

impl OccupantParams {
    /// Returns `(field, reason)` with the field relative to `occupants`.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, a) in self.agents.iter().enumerate() {
            let f = |name: &str| format!("agents[{i}].{name}");
            if !seen.insert(a.id) {
                return Err((f("id"), format!("duplicate agent id {}", a.id)));
            }
            for action in ActionType::ALL {
                let p = a.probs.get(action);
                if !(0.0..=1.0).contains(&p) {
                    return Err((
                        f(&format!("probs.{}", action.as_str())),
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
            }
            if !(a.clo_min <= a.clo && a.clo <= a.clo_max) {
                return Err((f("clo"), "must lie in [clo_min, clo_max]".into()));
            }
            if !(a.deadband_c >= 0.0) {
                return Err((f("deadband_c"), "must be non-negative".into()));
            }
            if a.coords.iter().chain([&a.t_pref_c]).any(|v| !v.is_finite()) {
                return Err((f("coords"), "must be finite".into()));
            }
        }
        self.surrogate.validate().map_err(|r| ("surrogate".to_string(), r))?;
        let o = &self.offsets;
        if !(o.drink_duration_s >= 0.0 && o.walk_duration_s >= 0.0 && o.clo_step >= 0.0) {
            return Err(("offsets".into(), "durations and clo_step must be non-negative".into()));
        }
        let d = &self.devices;
        if [d.heater_w, d.base_sensible_w, d.base_latent_w, d.walk_extra_w]
            .iter()
            .any(|v| !(*v >= 0.0))
        {
            return Err(("devices".into(), "ratings must be non-negative".into()));
        }
        if !(self.thermostat_band_c >= 0.0) {
            return Err(("thermostat_band_c".into(), "must be non-negative".into()));
        }
        Ok(())
    }
}

/// Aggregate occupant feedback into the zone.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OccupantGains {
    pub sensible_w: f64,
    pub latent_w: f64,
    pub thermostat_delta_c: f64,
}

/// Sums gains in id order and averages thermostat offsets.
pub fn aggregate_gains(agents: &[OccupantAgent], devices: &DeviceRatings, band_c: f64) -> OccupantGains {
    if agents.is_empty() {
        return OccupantGains::default();
    }
    let mut order: Vec<&OccupantAgent> = agents.iter().collect();
    order.sort_by_key(|a| a.id);
    let mut g = OccupantGains::default();
    let mut delta = 0.0;
    for a in order {
        g.sensible_w += devices.base_sensible_w;
        if a.heater_on {
            g.sensible_w += devices.heater_w;
        }
        if a.walk_timer_s > 0.0 {
            g.sensible_w += devices.walk_extra_w;
        }
        g.latent_w += devices.base_latent_w;
        delta += a.thermostat_delta_c;
    }
    g.thermostat_delta_c = (delta / agents.len() as f64).clamp(-band_c, band_c);
    g
}

/// One agent's outcome for a step.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentStep {
    pub id: u32,
    pub local: LocalCondition,
    pub score: DiscomfortScore,
    pub actions: Vec<ActionType>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationStep {
    pub gains: OccupantGains,
    pub agents: Vec<AgentStep>,
    /// Agents whose coordinates were clamped into the zone.
    pub clamped: usize,
}

impl PopulationStep {
    pub fn action_count(&self) -> usize {
        self.agents.iter().map(|a| a.actions.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub params: OccupantParams,
    pub agents: Vec<OccupantAgent>,
    pub steps: u64,
}

impl Population {
    pub fn new(params: OccupantParams) -> Self {
        let mut agents: Vec<OccupantAgent> = params.agents.iter().map(OccupantAgent::from_spec).collect();
        agents.sort_by_key(|a| a.id);
        Self {
            params,
            agents,
            steps: 0,
        }
    }

    /// Evaluates every agent once. Agents draw from their own substream of
    /// `(seed, agent id, step)`, so the result does not depend on `exec`.
    pub fn step(
        &mut self,
        seed: u64,
        step: u64,
        dt: f64,
        discharge: &DischargeAir,
        zone: &ZoneState,
        exec: Execution,
    ) -> PopulationStep {
        let surrogate = &self.params.surrogate;
        let offsets = &self.params.offsets;
        let outcomes = exec.map_mut(&mut self.agents, |a| {
            let local = surrogate.local_condition(discharge, zone, a.coords, a.device_offset_c(offsets));
            let score = comfort_eval(a, &local, offsets);
            let mut rng = substream(seed, Domain::Occupants, u64::from(a.id), step);
            let actions = behave(a, score, &mut rng, offsets, dt);
            AgentStep {
                id: a.id,
                local,
                score,
                actions,
            }
        });
        self.steps += 1;
        let gains = aggregate_gains(&self.agents, &self.params.devices, self.params.thermostat_band_c);
        PopulationStep {
            gains,
            clamped: outcomes.iter().filter(|o| o.local.clamped).count(),
            agents: outcomes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roster(n: u32, probs: ActionProbs) -> OccupantParams {
        OccupantParams {
            agents: (0..n)
                .map(|id| AgentSpec {
                    id,
                    coords: [f64::from(id % 10), f64::from(id % 8), 1.1],
                    t_pref_c: 21.0 + f64::from(id % 5),
                    probs,
                    ..AgentSpec::default()
                })
                .collect(),
            ..OccupantParams::default()
        }
    }

    #[test]
    fn no_agents_no_gains() {
        assert_eq!(
            aggregate_gains(&[], &DeviceRatings::default(), 2.0),
            OccupantGains::default()
        );
    }

    #[test]
    fn heater_adds_to_base() {
        let mut a = OccupantAgent::from_spec(&AgentSpec::default());
        a.heater_on = true;
        let g = aggregate_gains(&[a], &DeviceRatings::default(), 2.0);
        assert_eq!(g.sensible_w, 875.0);
        assert_eq!(g.latent_w, 55.0);
    }

    #[test]
    fn thermostat_mean_is_clamped() {
        let mut agents: Vec<_> = (0..3)
            .map(|id| {
                OccupantAgent::from_spec(&AgentSpec {
                    id,
                    ..AgentSpec::default()
                })
            })
            .collect();
        for a in &mut agents {
            a.thermostat_delta_c = 5.0;
        }
        assert_eq!(
            aggregate_gains(&agents, &DeviceRatings::default(), 2.0).thermostat_delta_c,
            2.0
        );
        agents[0].thermostat_delta_c = -1.0;
        agents[1].thermostat_delta_c = 0.5;
        agents[2].thermostat_delta_c = 0.0;
        assert!(
            (aggregate_gains(&agents, &DeviceRatings::default(), 2.0).thermostat_delta_c + 1.0 / 6.0).abs() < 1e-12
        );
    }

    #[test]
    fn validation_names_probability_path() {
        let mut p = roster(2, ActionProbs::default());
        p.agents[1].probs.drink = 1.3;
        let (field, _) = p.validate().unwrap_err();
        assert_eq!(field, "agents[1].probs.drink");
    }

    fn drive(exec: Execution, seed: u64) -> Vec<Vec<(u32, Vec<ActionType>)>> {
        let mut pop = Population::new(roster(40, ActionProbs::default()));
        let d = DischargeAir::from_ratio(14.0, 0.008, 0.5);
        let mut log = Vec::new();
        for step in 0..50 {
            let t = 20.0 + (step as f64 * 0.3).sin() * 6.0;
            let z = ZoneState::new(t, 0.009, vec![t, t + 1.0]);
            let out = pop.step(seed, step, 60.0, &d, &z, exec);
            log.push(out.agents.into_iter().map(|a| (a.id, a.actions)).collect());
        }
        log
    }

    #[test]
    fn identical_seeds_identical_action_logs() {
        assert_eq!(drive(Execution::Parallel, 9), drive(Execution::Parallel, 9));
        assert_eq!(drive(Execution::Sequential, 9), drive(Execution::Parallel, 9));
        assert_ne!(drive(Execution::Sequential, 9), drive(Execution::Sequential, 10));
    }

    proptest! {
        #[test]
        fn aggregate_matches_recomputation(
            states in proptest::collection::vec((any::<bool>(), 0.0..600.0f64, -3.0..3.0f64), 0..30),
            band in 0.0..3.0f64,
        ) {
            let devices = DeviceRatings::default();
            let agents: Vec<OccupantAgent> = states.iter().enumerate().map(|(i, &(heater, walk, delta))| {
                let mut a = OccupantAgent::from_spec(&AgentSpec { id: i as u32, ..AgentSpec::default() });
                a.heater_on = heater;
                a.walk_timer_s = walk;
                a.thermostat_delta_c = delta;
                a
            }).collect();
            let g = aggregate_gains(&agents, &devices, band);
            let n = states.len() as f64;
            let sens: f64 = states.iter().map(|&(h, w, _)| 75.0 + if h { 800.0 } else { 0.0 } + if w > 0.0 { 100.0 } else { 0.0 }).sum();
            prop_assert!((g.sensible_w - sens).abs() < 1e-9);
            prop_assert!((g.latent_w - 55.0 * n).abs() < 1e-9);
            if !states.is_empty() {
                let mean = states.iter().map(|s| s.2).sum::<f64>() / n;
                prop_assert!((g.thermostat_delta_c - mean.clamp(-band, band)).abs() < 1e-9);
            }
            prop_assert!(g.sensible_w >= 0.0);
            prop_assert!(g.sensible_w <= n * (75.0 + 800.0 + 100.0) + 1e-9);
        }
    }
}
