//! Per-step keyed time-series store and run export.
//!
//! All data exchanged between the plant side and the software side passes
//! through a [`DataStore`]: producers upsert samples into the open step, the
//! orchestrator seals the step once every producer is done, and sealed
//! frames are immutable. At the end of a run the sealed frames become a
//! [`RunLog`] that can be exported to long-format CSV.

mod export;
mod key;
mod runlog;
mod store;

use thiserror::Error;

pub use export::{
    csv_string, export_run, format_g17, import_run, read_frames, write_csv, ExportSummary, CSV_FILE, CSV_HEADER,
    META_FILE,
};
pub use key::{KeyRef, Source, VariableKey};
pub use runlog::{Frame, RunLog, RunMetadata, Sample};
pub use store::{DataStore, ProducerId, SeriesQuery};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("key {0} already registered")]
    DuplicateKey(String),
    #[error("unknown key {0}")]
    UnknownKey(String),
    #[error("non-finite value for {key} at step {step}")]
    NonFinite { key: String, step: u64 },
    #[error("write to step {step} rejected: step {last_sealed} already sealed")]
    OutOfOrder { step: u64, last_sealed: u64 },
    #[error("cannot seal step {step}: expected step {expected}")]
    SealOrder { step: u64, expected: u64 },
    #[error("cannot seal step {step}: waiting on {waiting:?}")]
    ProducersPending { step: u64, waiting: Vec<String> },
    #[error("step {step} is not sealed")]
    NotSealed { step: u64 },
    #[error("frames must be gap-free: expected step {expected}, found {found}")]
    FrameGap { expected: u64, found: u64 },
    #[error("data integrity: {0}")]
    Integrity(String),
    #[error("malformed CSV at row {row}: {reason}")]
    MalformedCsv { row: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
