//! Outdoor condition series on the run's step grid.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::BuildingError;
use crate::plant::OutdoorCondition;

/// Where the outdoor series comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeatherSource {
    /// CSV with header `time_s,tdb_c,rh_pct`; relative paths resolve
    /// against the scenario file's directory.
    Csv {
        path: PathBuf,
    },
    Constant {
        tdb_c: f64,
        rh_pct: f64,
    },
    /// Daily sinusoid peaking at `peak_hour`.
    DesignDay {
        mean_c: f64,
        amplitude_c: f64,
        #[serde(default = "default_peak_hour")]
        peak_hour: f64,
        rh_pct: f64,
    },
    /// Piecewise-constant: each point holds from its time until the next.
    Steps {
        points: Vec<WeatherPoint>,
    },
}

fn default_peak_hour() -> f64 {
    15.0
}

impl Default for WeatherSource {
    fn default() -> Self {
        WeatherSource::DesignDay {
            mean_c: 29.0,
            amplitude_c: 6.0,
            peak_hour: default_peak_hour(),
            rh_pct: 45.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatherPoint {
    pub time_s: f64,
    pub tdb_c: f64,
    pub rh_pct: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    pub step_size_s: f64,
    values: Vec<OutdoorCondition>,
}

impl WeatherSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[OutdoorCondition] {
        &self.values
    }

    /// Condition at the start of `step`.
    pub fn at(&self, step: u64) -> OutdoorCondition {
        self.values[(step as usize).min(self.values.len() - 1)]
    }
}

const COLUMNS: [&str; 3] = ["time_s", "tdb_c", "rh_pct"];

/// Reads a weather CSV and interpolates it onto `horizon` steps of
/// `step_size_s`. The file must reach the start of the last step.
pub fn load_weather(path: &Path, step_size_s: f64, horizon: u64) -> Result<WeatherSeries, BuildingError> {
    let file = std::fs::File::open(path).map_err(|e| BuildingError::Weather {
        row: 0,
        column: String::new(),
        reason: format!("{}: {e}", path.display()),
    })?;
    let points = read_points(file)?;
    resample(&points, step_size_s, horizon)
}

fn weather_err(row: u64, column: &str, reason: impl Into<String>) -> BuildingError {
    BuildingError::Weather {
        row,
        column: column.to_string(),
        reason: reason.into(),
    }
}

/// Parses weather CSV records. Row numbers in errors are file line numbers.
pub fn read_points<R: std::io::Read>(reader: R) -> Result<Vec<WeatherPoint>, BuildingError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| weather_err(1, "", e.to_string()))?.clone();
    let mut idx = [0usize; 3];
    for (slot, name) in idx.iter_mut().zip(COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| weather_err(1, name, "missing column"))?;
    }
    let mut points: Vec<WeatherPoint> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            weather_err(row, "", e.to_string())
        })?;
        let row = rec.position().map_or(0, |p| p.line());
        let mut vals = [0.0f64; 3];
        for ((v, &i), name) in vals.iter_mut().zip(&idx).zip(COLUMNS) {
            let raw = rec.get(i).ok_or_else(|| weather_err(row, name, "missing value"))?;
            *v = raw
                .parse::<f64>()
                .map_err(|_| weather_err(row, name, format!("not a number: {raw:?}")))?;
            if !v.is_finite() {
                return Err(weather_err(row, name, "non-finite value"));
            }
        }
        if let Some(prev) = points.last() {
            if vals[0] <= prev.time_s {
                return Err(weather_err(row, "time_s", "time_s must be strictly increasing"));
            }
        }
        points.push(WeatherPoint {
            time_s: vals[0],
            tdb_c: vals[1],
            rh_pct: vals[2],
        });
    }
    if points.is_empty() {
        return Err(weather_err(2, "", "no data rows"));
    }
    Ok(points)
}

/// Linear interpolation onto the step grid.
pub fn resample(points: &[WeatherPoint], step_size_s: f64, horizon: u64) -> Result<WeatherSeries, BuildingError> {
    let needed = horizon.saturating_sub(1) as f64 * step_size_s;
    let first = points.first().ok_or_else(|| weather_err(0, "", "no data rows"))?;
    let last = points[points.len() - 1];
    if first.time_s > 0.0 {
        return Err(weather_err(
            0,
            "time_s",
            format!("series starts at {} s, after run start", first.time_s),
        ));
    }
    if last.time_s < needed {
        return Err(BuildingError::InsufficientHorizon {
            last_s: last.time_s,
            needed_s: needed,
        });
    }
    let mut values = Vec::with_capacity(horizon as usize);
    let mut j = 0;
    for n in 0..horizon {
        let t = n as f64 * step_size_s;
        while j + 1 < points.len() && points[j + 1].time_s <= t {
            j += 1;
        }
        let a = points[j];
        let c = if a.time_s == t || j + 1 == points.len() {
            OutdoorCondition {
                t_c: a.tdb_c,
                rh_pct: a.rh_pct,
            }
        } else {
            let b = points[j + 1];
            let f = (t - a.time_s) / (b.time_s - a.time_s);
            OutdoorCondition {
                t_c: a.tdb_c + f * (b.tdb_c - a.tdb_c),
                rh_pct: a.rh_pct + f * (b.rh_pct - a.rh_pct),
            }
        };
        values.push(c);
    }
    Ok(WeatherSeries { step_size_s, values })
}

impl WeatherSource {
    /// Materializes the series. `base_dir` resolves relative CSV paths.
    pub fn series(
        &self,
        base_dir: Option<&Path>,
        step_size_s: f64,
        horizon: u64,
    ) -> Result<WeatherSeries, BuildingError> {
        let grid = |f: &dyn Fn(f64) -> OutdoorCondition| WeatherSeries {
            step_size_s,
            values: (0..horizon).map(|n| f(n as f64 * step_size_s)).collect(),
        };
        match self {
            WeatherSource::Csv { path } => {
                let full = match base_dir {
                    Some(dir) if path.is_relative() => dir.join(path),
                    _ => path.clone(),
                };
                load_weather(&full, step_size_s, horizon)
            }
            WeatherSource::Constant { tdb_c, rh_pct } => Ok(grid(&|_| OutdoorCondition {
                t_c: *tdb_c,
                rh_pct: *rh_pct,
            })),
            WeatherSource::DesignDay {
                mean_c,
                amplitude_c,
                peak_hour,
                rh_pct,
            } => Ok(grid(&|t| {
                let phase = 2.0 * std::f64::consts::PI * (t - peak_hour * 3600.0) / 86_400.0;
                OutdoorCondition {
                    t_c: mean_c + amplitude_c * phase.cos(),
                    rh_pct: *rh_pct,
                }
            })),
            WeatherSource::Steps { points } => {
                let mut sorted = points.clone();
                sorted.sort_by(|a, b| a.time_s.total_cmp(&b.time_s));
                if sorted.is_empty() {
                    return Err(weather_err(0, "points", "no points"));
                }
                Ok(grid(&|t| {
                    let p = sorted.iter().rev().find(|p| p.time_s <= t).unwrap_or(&sorted[0]);
                    OutdoorCondition {
                        t_c: p.tdb_c,
                        rh_pct: p.rh_pct,
                    }
                }))
            }
        }
    }

    pub fn validate(&self) -> Result<(), BuildingError> {
        let check = |c: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(weather_err(0, c, "non-finite value"))
            }
        };
        let rh = |v: f64| {
            if (0.0..=100.0).contains(&v) {
                Ok(())
            } else {
                Err(weather_err(0, "rh_pct", "must lie in [0, 100]"))
            }
        };
        match self {
            WeatherSource::Csv { .. } => Ok(()),
            WeatherSource::Constant { tdb_c, rh_pct } => {
                check("tdb_c", *tdb_c)?;
                rh(*rh_pct)
            }
            WeatherSource::DesignDay {
                mean_c,
                amplitude_c,
                peak_hour,
                rh_pct,
            } => {
                check("mean_c", *mean_c)?;
                check("amplitude_c", *amplitude_c)?;
                check("peak_hour", *peak_hour)?;
                rh(*rh_pct)
            }
            WeatherSource::Steps { points } => {
                if points.is_empty() {
                    return Err(weather_err(0, "points", "at least one point required"));
                }
                for p in points {
                    check("time_s", p.time_s)?;
                    check("tdb_c", p.tdb_c)?;
                    rh(p.rh_pct)?;
                }
                Ok(())
            }
        }
    }
}
