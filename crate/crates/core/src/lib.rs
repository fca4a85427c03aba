//! Lock-step hardware-in-the-loop co-simulation testbed for flexible
//! building loads.
//!
//! A simulated plant (HVAC unit, duct-built zone emulator, outdoor
//! emulator) exchanges data once per step with a software side (RC zone
//! model, occupant agents, supervisory grid-interactive controller)
//! through a keyed per-step [`datastore`]. The [`orchestrator`] enforces the
//! exchange sequence and injects communication, control and solver delays;
//! the [`analyzer`] computes integration-quality metrics over the result.

// `!(x >= 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analyzer;
pub mod building;
pub mod datastore;
pub mod exec;
pub mod geb;
pub mod occupants;
pub mod orchestrator;
pub mod plant;
pub mod psychro;
pub mod rng;
pub mod scenario;

pub use datastore::{DataStore, RunLog, Source, VariableKey};
pub use exec::Execution;
pub use orchestrator::{run, RunOutcome, Testbed};
pub use scenario::Scenario;
