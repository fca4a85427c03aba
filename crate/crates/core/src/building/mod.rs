//! Virtual building: single-node RC zone with moisture balance, weather
//! ingestion and a switchable one-step discharge input delay.

mod weather;
mod zone;

use thiserror::Error;

pub use weather::{load_weather, read_points, resample, WeatherPoint, WeatherSeries, WeatherSource};
pub use zone::{compute_zone_load, ZoneModel, ZoneParams, ZoneState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildingError {
    #[error("invalid building parameter {0}")]
    InvalidParameter(String),
    #[error("weather load error at row {row} column {column:?}: {reason}")]
    Weather { row: u64, column: String, reason: String },
    #[error("weather ends at {last_s} s but the run needs {needed_s} s")]
    InsufficientHorizon { last_s: f64, needed_s: f64 },
    #[error("non-finite zone input at step {step}")]
    NonFiniteInput { step: u64 },
}
