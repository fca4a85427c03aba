//! Long-format CSV export and import of a [`RunLog`].
//!
//! One row per stored sample, columns
//! `step_index,sim_time_s,variable,source,unit,value,wall_time_ms`, LF line
//! endings. Reals are written with 17 significant digits (`%.17g` style) so
//! that every `f64` survives the decimal round trip unchanged. Run metadata
//! goes to a JSON sidecar next to the CSV.

use std::fs::{self, File};
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Frame, RunLog, RunMetadata, Sample, Source, StoreError, VariableKey};

pub const CSV_HEADER: &str = "step_index,sim_time_s,variable,source,unit,value,wall_time_ms";
pub const CSV_FILE: &str = "run.csv";
pub const META_FILE: &str = "run.meta.json";

/// What [`export_run`] wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExportSummary {
    pub rows: usize,
    pub files: Vec<PathBuf>,
}

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros trimmed.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            format!("{}.{}", &digits[..split], &digits[split..])
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        };
        let body = body.trim_end_matches('0').trim_end_matches('.');
        format!("{sign}{body}")
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let e_sign = if exp < 0 { '-' } else { '+' };
        if frac.is_empty() {
            format!("{sign}{}e{e_sign}{:02}", &digits[..1], exp.abs())
        } else {
            format!("{sign}{}.{frac}e{e_sign}{:02}", &digits[..1], exp.abs())
        }
    }
}

/// Writes the CSV body for `log` to `out`; returns the number of data rows.
pub fn write_csv<W: Write>(log: &RunLog, out: W) -> io::Result<usize> {
    let mut out = BufWriter::new(out);
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    let mut rows = 0;
    for frame in log.frames() {
        for (key, s) in &frame.entries {
            let wall = s.wall_time_ms.map(|w| w.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.step_index,
                format_g17(s.sim_time_s),
                key.name(),
                key.source(),
                key.unit(),
                format_g17(s.value),
                wall
            )?;
            rows += 1;
        }
    }
    out.flush()?;
    Ok(rows)
}

/// Renders the CSV into a string (handy for byte comparisons).
pub fn csv_string(log: &RunLog) -> String {
    let mut buf = Vec::new();
    write_csv(log, &mut buf).expect("in-memory write");
    String::from_utf8(buf).expect("ascii output")
}

fn malformed(row: usize, reason: impl Into<String>) -> StoreError {
    StoreError::MalformedCsv {
        row,
        reason: reason.into(),
    }
}

/// Parses CSV rows into frames. `row` numbers in errors are 1-based file lines.
pub fn read_frames<R: Read>(input: R) -> Result<(Vec<Frame>, Option<f64>), StoreError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(input);
    let header = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != CSV_HEADER {
        return Err(malformed(1, format!("expected header `{CSV_HEADER}`")));
    }
    let mut frames: Vec<Frame> = Vec::new();
    let mut step_size = None;
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| malformed(row, e.to_string()))?;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let step: u64 = field(0)
            .parse()
            .map_err(|_| malformed(row, "step_index is not an unsigned integer"))?;
        let sim_time: f64 = field(1)
            .parse()
            .map_err(|_| malformed(row, "sim_time_s is not a number"))?;
        let source: Source = field(3).parse().map_err(|_| malformed(row, "unknown source"))?;
        let key = VariableKey::new(field(2), source, field(4)).map_err(|e| malformed(row, e.to_string()))?;
        let value: f64 = field(5).parse().map_err(|_| malformed(row, "value is not a number"))?;
        if !value.is_finite() {
            return Err(malformed(row, "value is not finite"));
        }
        let wall_time_ms = match field(6) {
            "" => None,
            w => Some(
                w.parse()
                    .map_err(|_| malformed(row, "wall_time_ms is not an integer"))?,
            ),
        };
        if step > 0 && step_size.is_none() {
            step_size = Some(sim_time / step as f64);
        }
        let expected = frames.len() as u64;
        match frames.last_mut() {
            Some(f) if f.step_index == step => {}
            _ if step == expected => frames.push(Frame::new(step)),
            _ => {
                return Err(malformed(
                    row,
                    format!("step {step} out of sequence (expected {expected} or the current step)"),
                ))
            }
        }
        let frame = frames.last_mut().expect("frame pushed above");
        let sample = Sample {
            step_index: step,
            sim_time_s: sim_time,
            value,
            wall_time_ms,
        };
        if frame.entries.insert(key.clone(), sample).is_some() {
            return Err(malformed(row, format!("duplicate sample for {key} at step {step}")));
        }
    }
    Ok((frames, step_size))
}

fn sidecar_path(csv_path: &Path) -> PathBuf {
    match csv_path.file_name().and_then(|n| n.to_str()) {
        Some(CSV_FILE) | None => csv_path.with_file_name(META_FILE),
        Some(name) => {
            let stem = name.strip_suffix(".csv").unwrap_or(name);
            csv_path.with_file_name(format!("{stem}.meta.json"))
        }
    }
}

/// Writes `run.csv` and `run.meta.json` into `dir`.
///
/// The CSV is written to a temporary name first and renamed into place, so
/// a failed export never leaves a truncated `run.csv` behind.
pub fn export_run(log: &RunLog, dir: &Path) -> Result<ExportSummary, StoreError> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(CSV_FILE);
    let partial = dir.join(format!("{CSV_FILE}.partial"));
    let rows = match File::create(&partial).and_then(|f| {
        let rows = write_csv(log, &f)?;
        f.sync_all()?;
        Ok(rows)
    }) {
        Ok(rows) => rows,
        Err(e) => {
            let _ = fs::remove_file(&partial);
            return Err(e.into());
        }
    };
    if let Err(e) = fs::rename(&partial, &csv_path) {
        let _ = fs::remove_file(&partial);
        return Err(e.into());
    }
    let meta_path = dir.join(META_FILE);
    let meta = serde_json::to_string_pretty(&log.metadata).map_err(|e| StoreError::Integrity(e.to_string()))?;
    fs::write(&meta_path, meta + "\n")?;
    Ok(ExportSummary {
        rows,
        files: vec![csv_path, meta_path],
    })
}

/// Reads a run back from its CSV (and metadata sidecar when present).
///
/// Without a sidecar the metadata is reconstructed from the rows: scenario
/// id `unknown`, seed 0, step size inferred from `sim_time_s`.
pub fn import_run(csv_path: &Path) -> Result<RunLog, StoreError> {
    let (frames, step_size) = read_frames(File::open(csv_path)?)?;
    let meta_path = sidecar_path(csv_path);
    let metadata = if meta_path.exists() {
        let text = fs::read_to_string(&meta_path)?;
        serde_json::from_str::<RunMetadata>(&text)
            .map_err(|e| StoreError::Integrity(format!("{}: {e}", meta_path.display())))?
    } else {
        RunMetadata {
            scenario_id: "unknown".into(),
            seed: 0,
            step_size_s: step_size.unwrap_or(60.0),
            start_wall_time_ms: 0,
        }
    };
    RunLog::new(metadata, frames)
}
