//! `hiltb`: validate and run co-simulation scenarios, analyze run logs, and
//! export artifacts.
//!
//! Exit status: 0 success, 1 validation error, 2 runtime error, 3 analyzer
//! insufficient data.

mod format;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hil_testbed::analyzer::{self, AnalyzerError, HuntingParams, SeriesRef, CAPACITY_RATIO_HI, CAPACITY_RATIO_LO};
use hil_testbed::datastore::{self, Frame, KeyRef, StoreError};
use hil_testbed::orchestrator::{self, RunError};
use hil_testbed::scenario::ScenarioError;
use hil_testbed::{Execution, RunLog, Scenario};

use format::Report;

#[derive(Debug, Parser)]
#[command(name = "hiltb", version, about = "Hardware-in-the-loop co-simulation testbed")]
struct Cli {
    /// Scenario document (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "HILTB_OUT_DIR", default_value = "hiltb-out")]
    out: PathBuf,
    /// Shorthand for `--set run.seed=N`; applied after every `--set`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Dotted-key override, e.g. `--set delays.comm_latency_s=20`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario and write run.csv, run.meta.json, summary.json and
    /// scenario.effective.json into the output directory.
    Run,
    /// Validate a scenario without running it; prints the effective config.
    Validate,
    /// Compute an integration-quality metric.
    Analyze(AnalyzeArgs),
    /// Re-export a run log, optionally restricted to some variables.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Export CSV to analyze. Without it, `--scenario` is run in memory.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Also write the report as JSON to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    metric: Metric,
}

#[derive(Debug, Subcommand)]
enum Metric {
    /// Root-mean-square difference pairing a[t] with b[t + shift].
    Rmse {
        #[arg(long)]
        a: SeriesRef,
        #[arg(long)]
        b: SeriesRef,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        shift: i64,
        /// Also search shifts in [-N, N] for the smallest RMSE.
        #[arg(long, value_name = "N")]
        best_within: Option<u32>,
    },
    /// Time to 63.2 % of the final change after an event.
    StepResponse {
        #[arg(long)]
        series: SeriesRef,
        #[arg(long)]
        event_time_s: f64,
        /// Samples averaged for the final value.
        #[arg(long, default_value_t = 60)]
        final_window: usize,
    },
    /// Sustained oscillation of a process variable around its setpoint.
    Hunting {
        #[arg(long, default_value = "zone.T:emulated")]
        pv: SeriesRef,
        #[arg(long, default_value = "zone.T:setpoint")]
        sp: SeriesRef,
        #[arg(long, default_value_t = 600.0)]
        settle_s: f64,
        /// Evaluation window after settling; 0 runs to the end.
        #[arg(long, default_value_t = 1800.0)]
        window_s: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 6)]
        n_min: usize,
    },
    /// Upper bound on the round-trip exchange delay from wall-clock stamps.
    DelayBound,
    /// Peak load against rated capacity.
    Capacity {
        /// Load series whose maximum is the peak.
        #[arg(long, conflicts_with = "peak", required_unless_present = "peak")]
        series: Option<SeriesRef>,
        /// Peak load, W.
        #[arg(long)]
        peak: Option<f64>,
        /// Rated capacity, W.
        #[arg(long)]
        rated: f64,
        #[arg(long, default_value_t = CAPACITY_RATIO_LO)]
        lo: f64,
        #[arg(long, default_value_t = CAPACITY_RATIO_HI)]
        hi: f64,
    },
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Export CSV to re-export. Without it, `--scenario` is run first.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Keep only these `name:source` variables (repeatable).
    #[arg(long = "variable", value_name = "NAME:SOURCE")]
    variables: Vec<KeyRef>,
}

/// A failure and the exit status it maps to.
#[derive(Debug)]
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn new(status: u8, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let status = if matches!(e, ScenarioError::Io { .. }) { 2 } else { 1 };
        Failure::new(status, format!("invalid scenario: {e}"))
    }
}

fn store_status(e: &StoreError) -> u8 {
    match e {
        StoreError::MalformedCsv { .. } | StoreError::UnknownKey(_) | StoreError::InvalidKey(_) => 1,
        // A gap in a requested series means there is not enough data.
        StoreError::Integrity(_) => 3,
        _ => 2,
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::new(store_status(&e), e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(e) => e.into(),
            RunError::Store(e) => Failure::new(
                if matches!(e, StoreError::Io(_)) {
                    2
                } else {
                    store_status(&e)
                },
                e.to_string(),
            ),
            other => Failure::new(2, format!("run failed: {other}")),
        }
    }
}

impl From<AnalyzerError> for Failure {
    fn from(e: AnalyzerError) -> Self {
        match e {
            AnalyzerError::Store(e) => e.into(),
            AnalyzerError::InsufficientData(_) | AnalyzerError::NoResponse => Failure::new(3, e.to_string()),
            other => Failure::new(1, other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("hiltb: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Run => cmd_run(cli),
        Command::Validate => cmd_validate(cli),
        Command::Analyze(a) => cmd_analyze(cli, a),
        Command::Export(e) => cmd_export(cli, e),
    }
}

fn overrides(cli: &Cli) -> Vec<String> {
    let mut v = cli.set.clone();
    if let Some(seed) = cli.seed {
        v.push(format!("run.seed={seed}"));
    }
    v
}

fn load_scenario(cli: &Cli) -> Result<Scenario, Failure> {
    let path = cli
        .scenario
        .as_deref()
        .ok_or_else(|| Failure::new(1, "--scenario is required for this command"))?;
    Ok(Scenario::load(path, &overrides(cli))?)
}

fn cmd_validate(cli: &Cli) -> Result<(), Failure> {
    let s = load_scenario(cli)?;
    println!("{}", s.effective_json());
    Ok(())
}

fn cmd_run(cli: &Cli) -> Result<(), Failure> {
    let s = load_scenario(cli)?;
    let (outcome, export) = orchestrator::run_to_dir(&s, &cli.out, Execution::default())?;
    let sm = &outcome.summary;
    println!(
        "scenario {} seed {}: {} steps, {} rows, {} overruns, {} late, {} dropped",
        sm.scenario_id, sm.seed, sm.steps, export.rows, sm.overruns, sm.late_results, sm.dropped_results
    );
    for f in &export.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

/// The log to analyze: an imported CSV, or an in-memory run of the scenario.
fn analysis_log(cli: &Cli, input: Option<&Path>) -> Result<RunLog, Failure> {
    match input {
        Some(p) => Ok(datastore::import_run(p)?),
        None if cli.scenario.is_some() => {
            let s = load_scenario(cli)?;
            Ok(orchestrator::run(&s)?.log)
        }
        None => Err(Failure::new(1, "give --input CSV or --scenario")),
    }
}

/// Serializes a metric struct for the report.
macro_rules! to_value {
    ($v:expr) => {
        serde_json::to_value($v).expect("metric serializes")
    };
}

fn cmd_analyze(cli: &Cli, args: &AnalyzeArgs) -> Result<(), Failure> {
    let mut report = Report::default();
    // Capacity from a given peak needs no log.
    if let Metric::Capacity {
        series: None,
        peak: Some(peak),
        rated,
        lo,
        hi,
    } = &args.metric
    {
        report.extend_from(to_value!(&analyzer::capacity_check(*peak, *rated, *lo, *hi)?));
        return emit(&report, args.report.as_deref());
    }
    let log = analysis_log(cli, args.input.as_deref())?;
    match &args.metric {
        Metric::Rmse {
            a,
            b,
            shift,
            best_within,
        } => {
            report.push("shift", (*shift).into());
            report.num("rmse", analyzer::rmse_in_log(&log, a, b, *shift)?);
            if let Some(n) = best_within {
                let n = i64::from(*n);
                let (best, rmse) =
                    analyzer::best_shift(&analyzer::series(&log, a)?, &analyzer::series(&log, b)?, -n..=n)?;
                report.push("best_shift", best.into());
                report.num("best_rmse", rmse);
            }
        }
        Metric::StepResponse {
            series,
            event_time_s,
            final_window,
        } => {
            let r = analyzer::step_response_in_log(&log, series, *event_time_s, *final_window)?;
            report.extend_from(to_value!(&r));
        }
        Metric::Hunting {
            pv,
            sp,
            settle_s,
            window_s,
            eps,
            n_min,
        } => {
            let p = HuntingParams {
                settle_s: *settle_s,
                window_s: (*window_s > 0.0).then_some(*window_s),
                eps_amp: *eps,
                n_min: *n_min,
            };
            report.extend_from(to_value!(&analyzer::hunting_in_log(&log, pv, sp, &p)?));
        }
        Metric::DelayBound => report.extend_from(to_value!(&analyzer::delay_bound_in_log(&log)?)),
        Metric::Capacity {
            series, rated, lo, hi, ..
        } => {
            let r = series.as_ref().expect("clap requires --series or --peak");
            let peak = analyzer::peak_in_log(&log, r)?;
            report.extend_from(to_value!(&analyzer::capacity_check(peak, *rated, *lo, *hi)?));
        }
    }
    emit(&report, args.report.as_deref())
}

fn emit(report: &Report, path: Option<&Path>) -> Result<(), Failure> {
    print!("{}", report.render());
    if let Some(p) = path {
        std::fs::write(p, report.to_json()).map_err(|e| Failure::new(2, format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn cmd_export(cli: &Cli, args: &ExportArgs) -> Result<(), Failure> {
    let log = analysis_log(cli, args.input.as_deref())?;
    let log = if args.variables.is_empty() {
        log
    } else {
        for v in &args.variables {
            if log.find_key(&v.name, v.source).is_none() {
                return Err(StoreError::UnknownKey(format!("{}:{}", v.name, v.source)).into());
            }
        }
        let frames: Vec<Frame> = log
            .frames()
            .iter()
            .map(|f| Frame {
                step_index: f.step_index,
                entries: f
                    .entries
                    .iter()
                    .filter(|(k, _)| args.variables.iter().any(|v| v.matches(k)))
                    .map(|(k, s)| (k.clone(), *s))
                    .collect(),
            })
            .collect();
        RunLog::new(log.metadata.clone(), frames)?
    };
    let summary = datastore::export_run(&log, &cli.out)?;
    println!("{} rows", summary.rows);
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
