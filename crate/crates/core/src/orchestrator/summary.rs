use std::time::{Duration, Instant};

use serde::Serialize;

use crate::scenario::RunMode;

/// Wall-clock pacing statistics. In fast mode pacing is disabled and every
/// statistic is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct PacingReport {
    pub enabled: bool,
    pub step_budget_ms: u64,
    pub tolerance_ms: u64,
    pub steps: u64,
    pub min_slack_ms: f64,
    pub max_slack_ms: f64,
    pub mean_slack_ms: f64,
    /// Steps whose work finished after the step's wall-clock deadline.
    pub overruns: u64,
    /// Steps whose start drifted more than the tolerance from schedule.
    pub tolerance_violations: u64,
    pub max_start_error_ms: f64,
}

/// Aligns step boundaries to the wall clock in realtime mode.
#[derive(Debug, Clone)]
pub struct Pacer {
    mode: RunMode,
    origin: Instant,
    step: Duration,
    report: PacingReport,
    slack_sum: f64,
}

impl Pacer {
    pub fn new(mode: RunMode, step_size_s: f64, tolerance_ms: u64) -> Self {
        Self {
            mode,
            origin: Instant::now(),
            step: Duration::from_secs_f64(step_size_s),
            report: PacingReport {
                enabled: mode == RunMode::Realtime,
                step_budget_ms: if mode == RunMode::Realtime {
                    (step_size_s * 1000.0).round() as u64
                } else {
                    0
                },
                tolerance_ms: if mode == RunMode::Realtime { tolerance_ms } else { 0 },
                ..PacingReport::default()
            },
            slack_sum: 0.0,
        }
    }

    pub fn is_realtime(&self) -> bool {
        self.mode == RunMode::Realtime
    }

    /// Restarts the wall-clock origin (realtime) at step 0.
    pub fn start(&mut self) {
        self.origin = Instant::now();
    }

    /// Milliseconds since the origin.
    pub fn elapsed_ms(&self) -> f64 {
        self.origin.elapsed().as_secs_f64() * 1000.0
    }

    /// Sleeps until `offset_s` past the start of `step` (realtime only).
    pub fn wait_until(&self, step: u64, offset_s: f64) {
        if !self.is_realtime() {
            return;
        }
        let target = self.origin + self.step.mul_f64(step as f64) + Duration::from_secs_f64(offset_s.max(0.0));
        let now = Instant::now();
        if target > now {
            std::thread::sleep(target - now);
        }
    }

    /// Records how far step `step` started from its scheduled time.
    pub fn step_started(&mut self, step: u64) {
        if !self.is_realtime() {
            return;
        }
        let scheduled = self.step.mul_f64(step as f64).as_secs_f64() * 1000.0;
        let err = (self.elapsed_ms() - scheduled).abs();
        self.report.max_start_error_ms = self.report.max_start_error_ms.max(err);
        if err > self.report.tolerance_ms as f64 {
            self.report.tolerance_violations += 1;
        }
    }

    /// Ends `step`: records slack to the next boundary and sleeps until it.
    pub fn pace(&mut self, step: u64) {
        if !self.is_realtime() {
            return;
        }
        let deadline = self.step.mul_f64((step + 1) as f64).as_secs_f64() * 1000.0;
        let slack = deadline - self.elapsed_ms();
        let r = &mut self.report;
        if r.steps == 0 {
            r.min_slack_ms = slack;
            r.max_slack_ms = slack;
        } else {
            r.min_slack_ms = r.min_slack_ms.min(slack);
            r.max_slack_ms = r.max_slack_ms.max(slack);
        }
        r.steps += 1;
        self.slack_sum += slack;
        r.mean_slack_ms = self.slack_sum / r.steps as f64;
        if slack < 0.0 {
            r.overruns += 1;
        }
        self.wait_until(step + 1, 0.0);
    }

    pub fn report(&self) -> PacingReport {
        self.report.clone()
    }
}

/// Structured end-of-run report.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct RunSummary {
    pub scenario_id: String,
    pub seed: u64,
    pub mode: String,
    pub steps: u64,
    /// Simulate phases that exceeded their budget.
    pub overruns: u64,
    pub overrun_steps: Vec<u64>,
    /// Results dropped by the skip-and-hold policy.
    pub dropped_results: u64,
    /// Results applied one or more steps after they were produced.
    pub late_results: u64,
    /// Steps with no simulated zone condition delivered (outage faults).
    pub outages: u64,
    /// Supervisory setpoints clamped to global bounds.
    pub clamp_events: u64,
    /// Outdoor/water envelope clamps and HVAC discharge limits, counted in
    /// plant substeps.
    pub limitation_events: u64,
    pub outdoor_limited_substeps: u64,
    pub water_limited_substeps: u64,
    pub hvac_limited_substeps: u64,
    pub emulator_saturated_substeps: u64,
    pub stale_input_substeps: u64,
    pub occupant_actions: u64,
    pub occupant_coords_clamped: u64,
    pub slow_results_used: u64,
    pub slow_results_stale: u64,
    pub pacing: PacingReport,
}

impl RunSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
