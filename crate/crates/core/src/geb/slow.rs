//! Timing contract for a supervisory controller that may need more than
//! one step to compute. A result is computed from the inputs at submit
//! time but only becomes visible at a later step barrier.

use serde::{Deserialize, Serialize};

use super::{rbc_step, GebError, GebParams, SupervisorySetpoints};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowInputs {
    pub step: u64,
    pub sim_time_s: f64,
    pub zone_t_c: f64,
    pub baseline: SupervisorySetpoints,
    pub signal: f64,
    pub previous_cooling_c: Option<f64>,
}

pub trait SlowPolicy: Send + Sync {
    fn compute(&self, inputs: &SlowInputs) -> SupervisorySetpoints;
}

/// Default policy: the rule-based output for the submitted inputs.
#[derive(Debug, Clone)]
pub struct RbcPolicy(pub GebParams);

impl SlowPolicy for RbcPolicy {
    fn compute(&self, i: &SlowInputs) -> SupervisorySetpoints {
        rbc_step(&self.0, i.sim_time_s, &i.baseline, i.signal, i.previous_cooling_c).setpoints
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlowResult {
    pub submit_step: u64,
    pub setpoints: SupervisorySetpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Pending {
    ready_step: u64,
    result: SlowResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowControllerHarness {
    pub compute_latency_s: f64,
    pub step_size_s: f64,
    pending: Option<Pending>,
}

impl SlowControllerHarness {
    pub fn new(compute_latency_s: f64, step_size_s: f64) -> Self {
        Self {
            compute_latency_s,
            step_size_s,
            pending: None,
        }
    }

    /// Steps between submit and first visibility; never less than one.
    pub fn latency_steps(&self) -> u64 {
        let raw = (self.compute_latency_s / self.step_size_s - 1e-9).ceil();
        (raw.max(1.0)) as u64
    }

    pub fn is_busy(&self) -> bool {
        self.pending.is_some()
    }

    pub fn submit(&mut self, inputs: &SlowInputs, policy: &dyn SlowPolicy) -> Result<(), GebError> {
        if let Some(p) = &self.pending {
            return Err(GebError::Busy {
                submitted: p.result.submit_step,
            });
        }
        self.pending = Some(Pending {
            ready_step: inputs.step + self.latency_steps(),
            result: SlowResult {
                submit_step: inputs.step,
                setpoints: policy.compute(inputs),
            },
        });
        Ok(())
    }

    /// Returns the completed result exactly once, at or after its ready
    /// step barrier. Never blocks.
    pub fn poll(&mut self, step: u64) -> Option<SlowResult> {
        match self.pending {
            Some(p) if step >= p.ready_step => {
                self.pending = None;
                Some(p.result)
            }
            _ => None,
        }
    }
}
