//! Modeled communication link between the plant and the software side.

use rand::Rng;

use crate::rng::{substream, Domain};
use crate::scenario::DelayParams;

const UP: u64 = 0;
const DOWN: u64 = 1;

/// Deterministic per-step latencies. Jitter for direction `d` at step `n`
/// is a uniform draw from the `(seed, d, n)` cell, so it never depends on
/// how many other draws were made.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayInjector {
    pub comm_latency_s: f64,
    pub uplink_fraction: f64,
    pub jitter_up_s: f64,
    pub jitter_down_s: f64,
    seed: u64,
}

impl DelayInjector {
    pub fn new(d: &DelayParams, seed: u64) -> Self {
        Self {
            comm_latency_s: d.comm_latency_s,
            uplink_fraction: d.uplink_fraction,
            jitter_up_s: d.jitter_up_s,
            jitter_down_s: d.jitter_down_s,
            seed,
        }
    }

    fn jitter(&self, direction: u64, bound: f64, step: u64) -> f64 {
        if bound <= 0.0 {
            return 0.0;
        }
        let u: f64 = substream(self.seed, Domain::Link, direction, step).gen();
        u * bound
    }

    /// Hardware-to-software latency at `step`, s.
    pub fn uplink_s(&self, step: u64) -> f64 {
        self.comm_latency_s * self.uplink_fraction + self.jitter(UP, self.jitter_up_s, step)
    }

    /// Software-to-hardware latency at `step`, s.
    pub fn downlink_s(&self, step: u64) -> f64 {
        self.comm_latency_s * (1.0 - self.uplink_fraction) + self.jitter(DOWN, self.jitter_down_s, step)
    }
}
