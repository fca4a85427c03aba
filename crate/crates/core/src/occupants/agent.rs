use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{AgentSpec, ComfortOffsets, LocalCondition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    HeaterToggle,
    FanToggle,
    ThermostatAdjust,
    ClothingAdjust,
    Drink,
    Walk,
}

impl ActionType {
    /// Fixed draw order: one uniform per action per step.
    pub const ALL: [ActionType; 6] = [
        ActionType::HeaterToggle,
        ActionType::FanToggle,
        ActionType::ThermostatAdjust,
        ActionType::ClothingAdjust,
        ActionType::Drink,
        ActionType::Walk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionType::HeaterToggle => "heater_toggle",
            ActionType::FanToggle => "fan_toggle",
            ActionType::ThermostatAdjust => "thermostat_adjust",
            ActionType::ClothingAdjust => "clothing_adjust",
            ActionType::Drink => "drink",
            ActionType::Walk => "walk",
        }
    }
}

/// Per-step firing probabilities, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActionProbs {
    pub heater_toggle: f64,
    pub fan_toggle: f64,
    pub thermostat_adjust: f64,
    pub clothing_adjust: f64,
    pub drink: f64,
    pub walk: f64,
}

impl Default for ActionProbs {
    fn default() -> Self {
        Self {
            heater_toggle: 0.05,
            fan_toggle: 0.05,
            thermostat_adjust: 0.02,
            clothing_adjust: 0.03,
            drink: 0.05,
            walk: 0.02,
        }
    }
}

impl ActionProbs {
    pub fn get(&self, a: ActionType) -> f64 {
        match a {
            ActionType::HeaterToggle => self.heater_toggle,
            ActionType::FanToggle => self.fan_toggle,
            ActionType::ThermostatAdjust => self.thermostat_adjust,
            ActionType::ClothingAdjust => self.clothing_adjust,
            ActionType::Drink => self.drink,
            ActionType::Walk => self.walk,
        }
    }

    pub fn zero() -> Self {
        Self {
            heater_toggle: 0.0,
            fan_toggle: 0.0,
            thermostat_adjust: 0.0,
            clothing_adjust: 0.0,
            drink: 0.0,
            walk: 0.0,
        }
    }
}

/// Signed discomfort, °C: negative too cold, positive too hot, 0 in band.
pub type DiscomfortScore = f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupantAgent {
    pub id: u32,
    pub coords: [f64; 3],
    pub clo: f64,
    pub clo_ref: f64,
    pub clo_min: f64,
    pub clo_max: f64,
    pub t_pref_c: f64,
    pub deadband_c: f64,
    pub probs: ActionProbs,
    pub heater_on: bool,
    pub fan_on: bool,
    pub drink_timer_s: f64,
    /// +1 hot drink, -1 cold drink.
    pub drink_sign: f64,
    pub walk_timer_s: f64,
    pub thermostat_delta_c: f64,
}

impl OccupantAgent {
    pub fn from_spec(spec: &AgentSpec) -> Self {
        Self {
            id: spec.id,
            coords: spec.coords,
            clo: spec.clo,
            clo_ref: spec.clo,
            clo_min: spec.clo_min,
            clo_max: spec.clo_max,
            t_pref_c: spec.t_pref_c,
            deadband_c: spec.deadband_c,
            probs: spec.probs,
            heater_on: false,
            fan_on: false,
            drink_timer_s: 0.0,
            drink_sign: 0.0,
            walk_timer_s: 0.0,
            thermostat_delta_c: 0.0,
        }
    }

    /// Personal device offset applied to the local air temperature.
    pub fn device_offset_c(&self, o: &ComfortOffsets) -> f64 {
        let mut d = 0.0;
        if self.fan_on {
            d += o.fan_c;
        }
        if self.heater_on {
            d += o.heater_c;
        }
        d
    }

    /// Clothing, drink and walk offsets on top of the local effective
    /// temperature.
    pub fn personal_offset_c(&self, o: &ComfortOffsets) -> f64 {
        let mut d = o.clo_c_per_clo * (self.clo - self.clo_ref);
        if self.drink_timer_s > 0.0 && o.drink_duration_s > 0.0 {
            d += self.drink_sign * o.drink_c * (self.drink_timer_s / o.drink_duration_s);
        }
        if self.walk_timer_s > 0.0 {
            d += o.walk_c;
        }
        d
    }
}

/// Distance of the perceived temperature beyond the comfort band.
pub fn comfort_eval(a: &OccupantAgent, local: &LocalCondition, o: &ComfortOffsets) -> DiscomfortScore {
    let t = local.effective_c + a.personal_offset_c(o);
    let lo = a.t_pref_c - a.deadband_c;
    let hi = a.t_pref_c + a.deadband_c;
    if t > hi {
        t - hi
    } else if t < lo {
        t - lo
    } else {
        0.0
    }
}

fn applicable(a: &OccupantAgent, action: ActionType, too_hot: bool, o: &ComfortOffsets) -> bool {
    match action {
        ActionType::HeaterToggle => a.heater_on == too_hot,
        ActionType::FanToggle => a.fan_on != too_hot,
        ActionType::ThermostatAdjust => true,
        ActionType::ClothingAdjust => {
            if too_hot {
                a.clo - o.clo_step >= a.clo_min - 1e-12
            } else {
                a.clo + o.clo_step <= a.clo_max + 1e-12
            }
        }
        ActionType::Drink => a.drink_timer_s <= 0.0,
        ActionType::Walk => !too_hot && a.walk_timer_s <= 0.0,
    }
}

fn apply(a: &mut OccupantAgent, action: ActionType, too_hot: bool, o: &ComfortOffsets) {
    let dir = if too_hot { -1.0 } else { 1.0 };
    match action {
        ActionType::HeaterToggle => a.heater_on = !a.heater_on,
        ActionType::FanToggle => a.fan_on = !a.fan_on,
        ActionType::ThermostatAdjust => a.thermostat_delta_c += dir * o.thermostat_step_c,
        ActionType::ClothingAdjust => a.clo = (a.clo - dir * o.clo_step).clamp(a.clo_min, a.clo_max),
        ActionType::Drink => {
            a.drink_timer_s = o.drink_duration_s;
            a.drink_sign = dir;
        }
        ActionType::Walk => a.walk_timer_s = o.walk_duration_s,
    }
}

/// One behavior evaluation.
///
/// Running effect timers advance by `dt` first. Exactly six uniforms are
/// drawn, one per action in [`ActionType::ALL`] order, whether or not the
/// agent is uncomfortable, so the stream position never depends on state.
/// An applicable action fires when its draw is below its probability.
pub fn behave<R: Rng>(
    a: &mut OccupantAgent,
    score: DiscomfortScore,
    rng: &mut R,
    o: &ComfortOffsets,
    dt: f64,
) -> Vec<ActionType> {
    a.drink_timer_s = (a.drink_timer_s - dt).max(0.0);
    if a.drink_timer_s == 0.0 {
        a.drink_sign = 0.0;
    }
    a.walk_timer_s = (a.walk_timer_s - dt).max(0.0);
    let draws: [f64; 6] = std::array::from_fn(|_| rng.gen::<f64>());
    if score == 0.0 {
        return Vec::new();
    }
    let too_hot = score > 0.0;
    let mut fired = Vec::new();
    for (action, u) in ActionType::ALL.into_iter().zip(draws) {
        if u < a.probs.get(action) && applicable(a, action, too_hot, o) {
            fired.push(action);
        }
    }
    for &action in &fired {
        apply(a, action, too_hot, o);
    }
    fired
}
