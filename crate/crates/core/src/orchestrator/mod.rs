//! Lock-step co-simulation master.
//!
//! Each step runs six phases in order:
//!
//! 1. **measure**: the plant publishes its state at the step boundary and
//!    the setpoints it is operating on.
//! 2. **transmit_up**: the measurements reach the software side after the
//!    uplink latency.
//! 3. **simulate**: occupants, supervisory control and the zone model each
//!    advance exactly one step.
//! 4. **transmit_down**: the results reach the plant after the downlink
//!    latency.
//! 5. **actuate**: the plant integrates to the next boundary; the new
//!    setpoints take effect at their arrival time. Because arrival is after
//!    the measure phase, the plant measured at step `N+1` is operating on
//!    the results of step `N` (the control delay).
//! 6. **seal**: the step's frame is frozen.
//!
//! Time is virtual in fast mode. In realtime mode the same modeled event
//! times are used for the physics, and the orchestrator additionally sleeps
//! so that every event happens no earlier than its modeled wall time;
//! logged `wall_time_ms` values are then real elapsed milliseconds.

mod catalog;
mod link;
mod summary;

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

pub use catalog::{catalog, EXCHANGED};
pub use link::DelayInjector;
pub use summary::{Pacer, PacingReport, RunSummary};

pub mod names {
    //! Variable names used in run logs.
    pub use super::catalog::*;
}

use crate::building::{compute_zone_load, BuildingError, WeatherSeries, ZoneModel};
use crate::datastore::{
    export_run, DataStore, ExportSummary, ProducerId, RunLog, RunMetadata, Sample, Source, StoreError,
};
use crate::exec::Execution;
use crate::geb::{
    rbc_step, ControllerKind, RbcPolicy, SlowControllerHarness, SlowInputs, SlowResult, SupervisorySetpoints,
};
use crate::occupants::Population;
use crate::plant::{DischargeAir, OutdoorCondition, Plant, PlantCommand, PlantError, ZoneTarget};
use crate::psychro::CP_AIR;
use crate::scenario::{FaultKind, OverrunPolicy, RunMode, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Building(#[from] BuildingError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error("overrun at step {step}: simulate phase took {simulate_time_s} s, budget {budget_s} s")]
    Overrun {
        step: u64,
        simulate_time_s: f64,
        budget_s: f64,
    },
    #[error("run already complete")]
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Delivery {
    origin_step: u64,
    /// Arrival time at the plant, s from run start.
    arrival_s: f64,
    command: PlantCommand,
}

/// What happened during one `step_once` call.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: u64,
    pub uplink_s: f64,
    pub simulate_time_s: f64,
    pub downlink_s: f64,
    pub overrun: bool,
    /// Origin steps of the results that took effect during this actuation.
    pub applied: Vec<u64>,
}

/// Complete co-simulation state. Cloning takes a snapshot from which
/// `step_once` reproduces the same successor state (fast mode).
#[derive(Debug, Clone)]
pub struct Testbed {
    scenario: Arc<Scenario>,
    weather: Arc<WeatherSeries>,
    store: DataStore,
    plant_producer: ProducerId,
    software_producer: ProducerId,
    pub plant: Plant,
    pub zone: ZoneModel,
    pub population: Population,
    slow: Option<SlowControllerHarness>,
    last_slow: Option<SlowResult>,
    prev_cooling: Option<f64>,
    link: DelayInjector,
    inflight: Vec<Delivery>,
    next_step: u64,
    exec: Execution,
    summary: RunSummary,
    pacer: Pacer,
}

fn ms_floor(t_s: f64) -> u64 {
    (t_s * 1000.0 + 1e-6).floor().max(0.0) as u64
}

fn ceil_tick(ms: f64, tick: u64) -> u64 {
    let ms = (ms - 1e-6).ceil().max(0.0) as u64;
    if tick == 0 {
        ms
    } else {
        ms.div_ceil(tick) * tick
    }
}

impl Testbed {
    pub fn new(scenario: &Scenario, exec: Execution) -> Result<Self, RunError> {
        scenario.validate()?;
        let s = scenario.clone();
        let weather = s.weather()?;
        let store = DataStore::new(s.run.step_size_s);
        catalog::register_all(&store, s.plant.outdoor.water_enabled, &s.logging.exclude)?;
        let plant_producer = store.register_producer("plant");
        let software_producer = store.register_producer("software");

        let out0 = weather.at(0);
        let zone = ZoneModel::new(
            s.building.zone.clone(),
            s.delays.inherited_delay,
            DischargeAir::from_rh(
                s.plant.hvac.t_neutral,
                s.building.zone.initial_rh_pct,
                s.plant.hvac.m_dot,
            ),
        )?;
        let initial = PlantCommand {
            zone_target: Some(ZoneTarget {
                t_c: zone.state.t_z,
                w: zone.state.w_z,
            }),
            setpoints: s.geb.baseline,
            outdoor_target: out0,
        };
        let plant = Plant::new(s.plant.clone(), initial)?;
        // The building's delay buffer starts with what the plant delivers.
        let mut zone = zone;
        zone.delay_buffer = plant.snapshot().discharge;
        let population = Population::new(s.occupants.clone());
        let slow = (s.geb.controller == ControllerKind::Slow)
            .then(|| SlowControllerHarness::new(s.geb.slow.compute_latency_s, s.run.step_size_s));
        let summary = RunSummary {
            scenario_id: s.run.id.clone(),
            seed: s.run.seed,
            mode: match s.run.mode {
                RunMode::Fast => "fast".into(),
                RunMode::Realtime => "realtime".into(),
            },
            ..RunSummary::default()
        };
        let pacer = Pacer::new(s.run.mode, s.run.step_size_s, s.run.pacing_tolerance_ms);
        Ok(Self {
            link: DelayInjector::new(&s.delays, s.run.seed),
            weather: Arc::new(weather),
            store,
            plant_producer,
            software_producer,
            plant,
            zone,
            population,
            slow,
            last_slow: None,
            prev_cooling: None,
            inflight: Vec::new(),
            next_step: 0,
            exec,
            summary,
            pacer,
            scenario: Arc::new(s),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn store(&self) -> &DataStore {
        &self.store
    }

    /// Index of the next step to execute.
    pub fn next_step(&self) -> u64 {
        self.next_step
    }

    pub fn is_finished(&self) -> bool {
        self.next_step >= self.scenario.run.horizon
    }

    pub fn summary(&self) -> RunSummary {
        let mut s = self.summary.clone();
        s.pacing = self.pacer.report();
        s
    }

    /// Writes `(name, source)` at `step` if that key is logged.
    fn put(&self, name: &str, source: Source, step: u64, value: f64, wall_ms: u64) -> Result<(), StoreError> {
        match self.store.lookup(name, source) {
            Some(key) => self.store.upsert(
                &key,
                Sample::at_step(step, self.scenario.run.step_size_s, value).with_wall_time(wall_ms),
            ),
            None => Ok(()),
        }
    }

    fn wall_ms(&self, modeled_s: f64) -> u64 {
        if self.pacer.is_realtime() {
            self.pacer.elapsed_ms().floor() as u64
        } else {
            ms_floor(modeled_s)
        }
    }

    fn simulate_time_s(&self, step: u64) -> f64 {
        self.scenario
            .delays
            .faults
            .iter()
            .filter(|f| f.step == step && f.kind == FaultKind::SlowSimulate)
            .filter_map(|f| f.simulate_time_s)
            .fold(self.scenario.delays.simulate_time_s, f64::max)
    }

    fn is_outage(&self, step: u64) -> bool {
        self.scenario
            .delays
            .faults
            .iter()
            .any(|f| f.step == step && f.kind == FaultKind::Outage)
    }

    /// Executes the six phases of the next step.
    pub fn step_once(&mut self) -> Result<StepReport, RunError> {
        if self.is_finished() {
            return Err(RunError::Finished);
        }
        let n = self.next_step;
        let sc = Arc::clone(&self.scenario);
        let dt = sc.run.step_size_s;
        let t_n = n as f64 * dt;
        if n == 0 {
            self.pacer.start();
        }
        self.pacer.step_started(n);

        // measure
        let snap = self.plant.snapshot();
        let send_s = t_n;
        let send_ms = self.wall_ms(send_s);
        self.publish_measurements(n, &snap, send_ms)?;

        // transmit_up
        let up = self.link.uplink_s(n);
        self.pacer.wait_until(n, up);
        let recv_s = send_s + up;

        // simulate
        let sim_time = self.simulate_time_s(n);
        let command = self.simulate(n, &snap, recv_s, sim_time)?;
        self.pacer.wait_until(n, up + sim_time);

        // transmit_down
        let down = self.link.downlink_s(n);
        let arrival_s = recv_s + sim_time + down;
        let budget = if sc.max_latency_s() < dt { dt - up - down } else { dt };
        let overrun = sim_time > budget;
        if overrun {
            self.summary.overruns += 1;
            self.summary.overrun_steps.push(n);
            if sc.run.overrun_policy == OverrunPolicy::Abort {
                return Err(RunError::Overrun {
                    step: n,
                    simulate_time_s: sim_time,
                    budget_s: budget,
                });
            }
            self.summary.dropped_results += 1;
        } else {
            self.inflight.push(Delivery {
                origin_step: n,
                arrival_s,
                command,
            });
        }

        // actuate
        let t_next = t_n + dt;
        self.inflight.sort_by(|a, b| {
            a.arrival_s
                .total_cmp(&b.arrival_s)
                .then(a.origin_step.cmp(&b.origin_step))
        });
        let (due, later): (Vec<Delivery>, Vec<Delivery>) =
            self.inflight.iter().partition(|d| d.arrival_s < t_next - 1e-9);
        self.inflight = later;
        let mut applied = Vec::new();
        let mut switches = Vec::new();
        for d in &due {
            self.pacer.wait_until(n, d.arrival_s - t_n);
            let rx_ms = if self.pacer.is_realtime() {
                ceil_tick(self.pacer.elapsed_ms(), sc.plant.hw_log_tick_ms)
            } else {
                ceil_tick(d.arrival_s * 1000.0, sc.plant.hw_log_tick_ms)
            };
            self.put(names::RX_STEP, Source::Setpoint, n, d.origin_step as f64, rx_ms)?;
            if let Some(z) = d.command.zone_target {
                self.put(names::RX_ZONE_T, Source::Setpoint, n, z.t_c, rx_ms)?;
            }
            self.put(
                names::RX_CLG_SPT,
                Source::Setpoint,
                n,
                d.command.setpoints.cooling_c,
                rx_ms,
            )?;
            if d.origin_step < n {
                self.summary.late_results += 1;
            }
            applied.push(d.origin_step);
            switches.push(((d.arrival_s - t_n).max(0.0), d.command));
        }
        let report = self.plant.advance(dt, &switches);
        self.summary.outdoor_limited_substeps += u64::from(report.outdoor_limited);
        self.summary.water_limited_substeps += u64::from(report.water_limited);
        self.summary.hvac_limited_substeps += u64::from(report.hvac_limited);
        self.summary.limitation_events +=
            u64::from(report.outdoor_limited) + u64::from(report.water_limited) + u64::from(report.hvac_limited);
        self.summary.emulator_saturated_substeps += u64::from(report.emulator_saturated);
        self.summary.stale_input_substeps += u64::from(report.stale_input);
        let plant_ms = self.wall_ms(t_next);
        self.put(
            names::SATURATED,
            Source::Emulated,
            n,
            f64::from(report.emulator_saturated),
            plant_ms,
        )?;
        self.put(
            names::LIMITED,
            Source::Emulated,
            n,
            f64::from(report.outdoor_limited + report.water_limited + report.hvac_limited),
            plant_ms,
        )?;
        self.put(
            names::STALE,
            Source::Emulated,
            n,
            f64::from(report.stale_input),
            plant_ms,
        )?;

        // seal
        self.store.producer_done(self.plant_producer, n);
        self.store.producer_done(self.software_producer, n);
        self.store.seal(n)?;
        self.summary.steps += 1;
        self.next_step += 1;
        self.pacer.pace(n);
        Ok(StepReport {
            step: n,
            uplink_s: up,
            simulate_time_s: sim_time,
            downlink_s: down,
            overrun,
            applied,
        })
    }

    fn publish_measurements(&self, n: u64, snap: &crate::plant::PlantSnapshot, ms: u64) -> Result<(), StoreError> {
        use names::*;
        use Source::{Emulated as E, Setpoint as P};
        let d = &snap.discharge;
        let applied = &snap.applied;
        let mut rows = vec![
            (ZONE_T, E, snap.zone.t_c),
            (ZONE_RH, E, snap.zone_rh_pct),
            (DIS_T, E, d.t_dis),
            (DIS_RH, E, d.rh_dis()),
            (DIS_MDOT, E, d.m_dot),
            (OUT_T, E, snap.outdoor.t_c),
            (OUT_RH, E, snap.outdoor.rh_pct),
            (LOAD_SENSIBLE, E, snap.sensible_load_w),
            (HEATER_W, E, snap.heater_w),
            (COOLING_W, E, snap.cooling_w),
            (HUMIDIFIER, E, snap.humidifier_kgs),
            (HVAC_COOLING_W, E, snap.hvac_cooling_w),
            (HVAC_HEATING_W, E, snap.hvac_heating_w),
            (OUT_T, P, applied.outdoor_target.t_c),
            (OUT_RH, P, applied.outdoor_target.rh_pct),
            (CLG_SPT, P, applied.setpoints.cooling_c),
            (HTG_SPT, P, applied.setpoints.heating_c),
            (DAT_SPT, P, applied.setpoints.discharge_c),
        ];
        if let Some(w) = snap.water_t_c {
            rows.push((WATER_T, E, w));
        }
        let target = applied.zone_target.unwrap_or(self.plant_last_target());
        rows.push((ZONE_T, P, target.t_c));
        rows.push((ZONE_RH, P, crate::psychro::relative_humidity(target.t_c, target.w)));
        for (name, source, value) in rows {
            self.put(name, source, n, value, ms)?;
        }
        Ok(())
    }

    fn plant_last_target(&self) -> ZoneTarget {
        let s = &self.plant.emulator.state;
        ZoneTarget {
            t_c: s.t_emu,
            w: s.w_emu,
        }
    }

    /// Software side of step `n`: every model advances exactly once.
    fn simulate(
        &mut self,
        n: u64,
        snap: &crate::plant::PlantSnapshot,
        recv_s: f64,
        sim_time: f64,
    ) -> Result<PlantCommand, RunError> {
        use names::*;
        use Source::Simulated as S;
        let sc = Arc::clone(&self.scenario);
        let dt = sc.run.step_size_s;
        let t_n = n as f64 * dt;
        let discharge = snap.discharge;
        let out = self.weather.at(n);

        let occ = self
            .population
            .step(sc.run.seed, n, dt, &discharge, &self.zone.state, self.exec);
        let gains = occ.gains;
        self.summary.occupant_actions += occ.action_count() as u64;
        self.summary.occupant_coords_clamped += occ.clamped as u64;

        let mut baseline = sc.geb.baseline;
        baseline.cooling_c += gains.thermostat_delta_c;
        baseline.heating_c += gains.thermostat_delta_c;
        let signal = sc.geb.signal_at(n);
        let rbc = rbc_step(&sc.geb, t_n, &baseline, signal, self.prev_cooling);
        if rbc.clamped {
            self.summary.clamp_events += 1;
        }
        let (setpoints, slow_age) = self.supervise(n, t_n, &baseline, signal, rbc.setpoints)?;
        self.prev_cooling = Some(setpoints.cooling_c);

        let effective = self.zone.zone_step(discharge, &out, &gains, dt)?;
        let zs = self.zone.state.clone();
        let (sensible, latent) = compute_zone_load(&zs, &effective);

        let ms = self.wall_ms(recv_s + sim_time);
        let surface = if zs.surface_temps.is_empty() {
            zs.t_z
        } else {
            zs.surface_temps.iter().sum::<f64>() / zs.surface_temps.len() as f64
        };
        let discomfort = if occ.agents.is_empty() {
            0.0
        } else {
            occ.agents.iter().map(|a| a.score).sum::<f64>() / occ.agents.len() as f64
        };
        let rows = [
            (ZONE_T, zs.t_z),
            (ZONE_RH, zs.rh_z),
            (SURFACE_T, surface),
            (DIS_T, effective.t_dis),
            (OUT_T, out.t_c),
            (OUT_RH, out.rh_pct),
            (LOAD_SENSIBLE, sensible),
            (LOAD_LATENT, latent),
            (CLG_SPT, setpoints.cooling_c),
            (HTG_SPT, setpoints.heating_c),
            (DAT_SPT, setpoints.discharge_c),
            (OCC_SENSIBLE, gains.sensible_w),
            (OCC_LATENT, gains.latent_w),
            (OCC_THERMOSTAT, gains.thermostat_delta_c),
            (OCC_ACTIONS, occ.action_count() as f64),
            (OCC_DISCOMFORT, discomfort),
            (GEB_ACTIVE, f64::from(u8::from(rbc.active))),
            (GEB_CLAMPED, f64::from(u8::from(rbc.clamped))),
            (GEB_SLOW_AGE, slow_age),
        ];
        for (name, value) in rows {
            self.put(name, S, n, value, ms)?;
        }

        let zone_target = if self.is_outage(n) {
            self.summary.outages += 1;
            None
        } else {
            Some(ZoneTarget { t_c: zs.t_z, w: zs.w_z })
        };
        Ok(PlantCommand {
            zone_target,
            setpoints,
            outdoor_target: OutdoorCondition {
                t_c: out.t_c,
                rh_pct: out.rh_pct,
            },
        })
    }

    /// Chooses between the slow controller's latest fresh result and the
    /// rule-based output. Returns the setpoints and the age (steps) of the
    /// slow result used, or -1 when none was used.
    fn supervise(
        &mut self,
        n: u64,
        t_n: f64,
        baseline: &SupervisorySetpoints,
        signal: f64,
        rbc: SupervisorySetpoints,
    ) -> Result<(SupervisorySetpoints, f64), RunError> {
        let Some(h) = self.slow.as_mut() else {
            return Ok((rbc, -1.0));
        };
        if let Some(r) = h.poll(n) {
            self.last_slow = Some(r);
        }
        let fresh = self
            .last_slow
            .filter(|r| n - r.submit_step <= self.scenario.geb.slow.freshness_steps);
        if self.last_slow.is_some() && fresh.is_none() {
            self.summary.slow_results_stale += 1;
        }
        let chosen = match fresh {
            Some(r) => {
                self.summary.slow_results_used += 1;
                (r.setpoints, (n - r.submit_step) as f64)
            }
            None => (rbc, -1.0),
        };
        if !h.is_busy() {
            let inputs = SlowInputs {
                step: n,
                sim_time_s: t_n,
                zone_t_c: self.zone.state.t_z,
                baseline: *baseline,
                signal,
                previous_cooling_c: self.prev_cooling,
            };
            let policy = RbcPolicy(self.scenario.geb.clone());
            h.submit(&inputs, &policy).expect("harness idle");
        }
        Ok(chosen)
    }

    /// Sealed frames as a run log.
    pub fn run_log(&self) -> Result<RunLog, StoreError> {
        let start = if self.pacer.is_realtime() {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_millis() as u64)
                .saturating_sub(self.pacer.elapsed_ms() as u64)
        } else {
            0
        };
        self.store.to_run_log(RunMetadata {
            scenario_id: self.scenario.run.id.clone(),
            seed: self.scenario.run.seed,
            step_size_s: self.scenario.run.step_size_s,
            start_wall_time_ms: start,
        })
    }
}

/// Sensible load the emulator sees, recomputed from logged values.
pub fn emulated_sensible_load(t_emu: f64, t_dis: f64, m_dot: f64) -> f64 {
    m_dot * CP_AIR * (t_emu - t_dis)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub log: RunLog,
    pub summary: RunSummary,
}

/// Runs a scenario to its horizon with the default execution strategy.
pub fn run(scenario: &Scenario) -> Result<RunOutcome, RunError> {
    run_with(scenario, Execution::default())
}

pub fn run_with(scenario: &Scenario, exec: Execution) -> Result<RunOutcome, RunError> {
    let mut tb = Testbed::new(scenario, exec)?;
    while !tb.is_finished() {
        tb.step_once()?;
    }
    Ok(RunOutcome {
        log: tb.run_log()?,
        summary: tb.summary(),
    })
}

/// Runs and writes the export, summary and effective scenario into `dir`.
pub fn run_to_dir(scenario: &Scenario, dir: &Path, exec: Execution) -> Result<(RunOutcome, ExportSummary), RunError> {
    let outcome = run_with(scenario, exec)?;
    std::fs::create_dir_all(dir).map_err(StoreError::from)?;
    let mut export = export_run(&outcome.log, dir)?;
    let summary_path = dir.join("summary.json");
    std::fs::write(&summary_path, outcome.summary.to_json()).map_err(StoreError::from)?;
    let effective_path = dir.join("scenario.effective.json");
    std::fs::write(&effective_path, scenario.effective_json()).map_err(StoreError::from)?;
    export.files.push(summary_path);
    export.files.push(effective_path);
    Ok((outcome, export))
}

/// Runs a batch of seeds, one run each, preserving seed order.
pub fn run_trials(scenario: &Scenario, seeds: &[u64], exec: Execution) -> Vec<Result<RunOutcome, RunError>> {
    exec.map(seeds, |&seed| {
        let mut s = scenario.clone();
        s.run.seed = seed;
        // Trials run concurrently with each other, not within.
        run_with(&s, Execution::Sequential)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(horizon: u64) -> Scenario {
        let mut s = Scenario::default();
        s.run.horizon = horizon;
        s
    }

    #[test]
    fn horizon_ten_gives_steps_zero_to_nine_fully_populated() {
        let out = run(&scenario(10)).unwrap();
        assert_eq!(out.log.len(), 10);
        let keys = out.log.keys();
        for (i, f) in out.log.frames().iter().enumerate() {
            assert_eq!(f.step_index, i as u64);
            assert_eq!(f.entries.len(), keys.len(), "step {i}");
        }
    }

    #[test]
    fn snapshot_replays_identically() {
        let mut tb = Testbed::new(&scenario(20), Execution::Sequential).unwrap();
        for _ in 0..5 {
            tb.step_once().unwrap();
        }
        let mut a = tb.clone();
        let mut b = tb;
        let ra = a.step_once().unwrap();
        let rb = b.step_once().unwrap();
        assert_eq!(ra, rb);
        assert_eq!(a.store().fetch_frame(5), b.store().fetch_frame(5));
        assert_eq!(a.plant, b.plant);
        assert_eq!(a.zone, b.zone);
    }

    #[test]
    fn models_never_run_ahead_of_orchestrator() {
        let mut tb = Testbed::new(&scenario(15), Execution::Sequential).unwrap();
        while !tb.is_finished() {
            tb.step_once().unwrap();
            assert_eq!(tb.zone.steps, tb.next_step());
            assert_eq!(tb.population.steps, tb.next_step());
        }
        assert!(matches!(tb.step_once(), Err(RunError::Finished)));
    }

    #[test]
    fn latency_below_one_step_applies_at_next_step() {
        let mut s = scenario(12);
        s.delays.comm_latency_s = 59.0;
        s.plant.substep_s = 0.5;
        let mut tb = Testbed::new(&s, Execution::Sequential).unwrap();
        while !tb.is_finished() {
            let r = tb.step_once().unwrap();
            assert_eq!(r.applied, vec![r.step]);
        }
        let log = tb.run_log().unwrap();
        let spt = log.dense_series(names::ZONE_T, Source::Setpoint).unwrap();
        let sim = log.dense_series(names::ZONE_T, Source::Simulated).unwrap();
        for n in 1..spt.len() {
            assert_eq!(spt[n], sim[n - 1]);
        }
    }

    #[test]
    fn stale_hold_applies_late_results_later() {
        let mut s = scenario(10);
        s.delays.comm_latency_s = 90.0;
        s.delays.stale_hold = true;
        let mut tb = Testbed::new(&s, Execution::Sequential).unwrap();
        let mut applied = Vec::new();
        while !tb.is_finished() {
            applied.push(tb.step_once().unwrap().applied);
        }
        assert!(applied[0].is_empty());
        assert_eq!(applied[1], vec![0]);
        assert_eq!(applied[2], vec![1]);
        assert_eq!(tb.summary().late_results, 9);
    }

    #[test]
    fn overrun_abort_stops_the_run() {
        let mut s = scenario(10);
        s.run.overrun_policy = OverrunPolicy::Abort;
        s.delays.faults.push(crate::scenario::Fault {
            step: 4,
            kind: FaultKind::SlowSimulate,
            simulate_time_s: Some(75.0),
        });
        let err = run(&s).unwrap_err();
        assert!(matches!(err, RunError::Overrun { step: 4, .. }));
    }

    #[test]
    fn fast_mode_summary_has_pacing_disabled() {
        let out = run(&scenario(3)).unwrap();
        assert!(!out.summary.pacing.enabled);
        assert_eq!(out.summary.steps, 3);
    }
}
