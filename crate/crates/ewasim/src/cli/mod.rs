//! Command-line front end: scenario loading, subcommand dispatch, and exit
//! codes.
//!
//! Exit codes: 0 success; 1 equivalence check failed its threshold; 2 parse
//! or I/O error (message carries line and column for JSON problems);
//! 3 validation error; 4 numerical error.

pub mod file;
pub mod output;

use crate::dynamics::DynamicsError;
use crate::ewa::EwaError;
use crate::experiments::{self, ExperimentError};
use crate::lindblad::{self, LindbladError};
use crate::linalg::LinalgError;
use crate::metrics::MetricsError;
use crate::model::{ModelError, Scenario};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use file::ScenarioFile;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Equivalence threshold for the `validate` subcommand.
pub const EQUIVALENCE_THRESHOLD: f64 = 1e-6;
/// Grid used by `validate`: master-equation integration is costly, so the
/// check runs on a short window rather than the full scenario grid.
pub const VALIDATE_T_MAX: f64 = 5.0;
pub const VALIDATE_STEPS: usize = 50;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("equivalence check failed: max trace distance {distance:.3e} > {EQUIVALENCE_THRESHOLD:.0e}")]
    EquivalenceFailed { distance: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::EquivalenceFailed { .. } => 1,
            CliError::Io { .. } | CliError::Write { .. } | CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

fn from_linalg(e: LinalgError) -> CliError {
    match e {
        LinalgError::BadPanelCount { .. } | LinalgError::BadInterval { .. } => {
            CliError::Validation(e.to_string())
        }
        other => CliError::Numerical(other.to_string()),
    }
}

fn from_model(e: ModelError) -> CliError {
    CliError::Validation(e.to_string())
}

fn from_ewa(e: EwaError) -> CliError {
    match e {
        EwaError::Model(m) => from_model(m),
        EwaError::Linalg(l) => from_linalg(l),
        EwaError::BadConfig(_) => CliError::Validation(e.to_string()),
        other => CliError::Numerical(other.to_string()),
    }
}

fn from_dynamics(e: DynamicsError) -> CliError {
    match e {
        DynamicsError::Model(m) => from_model(m),
        DynamicsError::Linalg(l) => from_linalg(l),
        DynamicsError::Ewa(w) => from_ewa(w),
        other => CliError::Validation(other.to_string()),
    }
}

fn from_metrics(e: MetricsError) -> CliError {
    match e {
        MetricsError::Model(m) => from_model(m),
        MetricsError::Linalg(l) => from_linalg(l),
        MetricsError::Ewa(w) => from_ewa(w),
        MetricsError::Dynamics(d) => from_dynamics(d),
        other => CliError::Numerical(other.to_string()),
    }
}

fn from_experiment(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::Model(m) => from_model(m),
        ExperimentError::Ewa(w) => from_ewa(w),
        ExperimentError::Dynamics(d) => from_dynamics(d),
        ExperimentError::Metrics(m) => from_metrics(m),
        other @ (ExperimentError::UnknownPreset { .. } | ExperimentError::BadSweep(_)) => {
            CliError::Validation(other.to_string())
        }
    }
}

fn from_lindblad(e: LindbladError) -> CliError {
    match e {
        LindbladError::Linalg(l) => from_linalg(l),
        LindbladError::Positivity { .. }
        | LindbladError::NoStepConvergence { .. } => CliError::Numerical(e.to_string()),
        other => CliError::Validation(other.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "ewasim",
    version,
    about = "Simulate block non-Hermitian Hamiltonians: effective evanescent-wave dynamics, \
             fidelity metrics, Zeno sweeps, and master-equation cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["scenario", "preset"])))]
struct SourceArgs {
    /// Path to a scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Name of a built-in preset (see `presets`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and emit the per-time fidelity table.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Run the scenario once per decay-rate value and emit per-value series
    /// plus a summary table.
    Sweep {
        #[command(flatten)]
        source: SourceArgs,
        /// Output prefix: writes `<prefix>_gamma_<value>.<ext>` per value and
        /// `<prefix>_summary.<ext>`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Cross-check the scenario's non-Hermitian evolution against the full
    /// master equation on A+B+G; exit 0 iff they agree to 1e-6.
    Validate {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Emit the decaying-component norm bound next to the exact norm.
    Bound {
        #[command(flatten)]
        source: SourceArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in presets.
    Presets,
}

/// Parse arguments from the process environment and run. Returns the exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { source, out, format } => cmd_simulate(&source, out.as_deref(), format),
        Command::Sweep { source, out, format } => cmd_sweep(&source, &out, format, cli.threads),
        Command::Validate { source } => cmd_validate(&source),
        Command::Bound { source, out } => cmd_bound(&source, out.as_deref()),
        Command::Presets => {
            cmd_presets();
            Ok(())
        }
    }
}

fn load_scenario(source: &SourceArgs) -> Result<Scenario, CliError> {
    if let Some(path) = &source.scenario {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let parsed: ScenarioFile =
            serde_json::from_str(&text).map_err(|source| CliError::Parse {
                path: path.display().to_string(),
                source,
            })?;
        parsed.try_into().map_err(CliError::Validation)
    } else if let Some(name) = &source.preset {
        experiments::preset(name).map_err(from_experiment)
    } else {
        unreachable!("clap enforces the source group")
    }
}

fn write_with<F>(out: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: Fn(&mut dyn Write) -> std::io::Result<()>,
{
    match out {
        Some(path) => {
            let mut handle = fs::File::create(path).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })?;
            write(&mut handle).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })
        }
        None => {
            let stdout = std::io::stdout();
            let mut handle = stdout.lock();
            write(&mut handle).map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}

fn cmd_simulate(source: &SourceArgs, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let sc = load_scenario(source)?;
    let run = experiments::run_scenario(&sc).map_err(from_experiment)?;
    write_with(out, |w| match format {
        Format::Csv => output::write_series_csv(w, &run),
        Format::Json => output::write_series_json(w, &sc.label, &run),
    })?;
    if let Some(path) = out {
        println!("wrote {} rows to {}", run.series.times.len(), path.display());
    }
    Ok(())
}

fn sweep_paths(prefix: &Path, format: Format, values: &[f64]) -> (Vec<PathBuf>, PathBuf) {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let stem = {
        let s = prefix.display().to_string();
        s.strip_suffix(".csv")
            .or_else(|| s.strip_suffix(".json"))
            .map(str::to_string)
            .unwrap_or(s)
    };
    let per_value = values
        .iter()
        .map(|v| PathBuf::from(format!("{stem}_gamma_{}.{ext}", output::axis_value_label(*v))))
        .collect();
    (per_value, PathBuf::from(format!("{stem}_summary.{ext}")))
}

fn cmd_sweep(source: &SourceArgs, out: &Path, format: Format, threads: usize) -> Result<(), CliError> {
    let sc = load_scenario(source)?;
    let values = sc
        .sweep
        .as_ref()
        .map(|s| s.values.clone())
        .unwrap_or_default();
    if values.is_empty() {
        return Err(CliError::Validation(
            "scenario has no sweep values (add a sweep block or use a preset)".into(),
        ));
    }
    if let Some(spec) = &sc.sweep {
        if spec.axis != "Gamma3_over_eps" {
            return Err(CliError::Validation(format!(
                "unsupported sweep axis '{}'; only Gamma3_over_eps is available",
                spec.axis
            )));
        }
    }

    let sweep = if threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        pool.install(|| experiments::gamma_sweep(&sc, &values))
    } else {
        experiments::gamma_sweep(&sc, &values)
    }
    .map_err(from_experiment)?;

    let (per_value, summary_path) = sweep_paths(out, format, &sweep.axis_values);
    for (path, run) in per_value.iter().zip(&sweep.runs) {
        write_with(Some(path), |w| match format {
            Format::Csv => output::write_series_csv(w, run),
            Format::Json => output::write_series_json(w, &sc.label, run),
        })?;
    }
    write_with(Some(&summary_path), |w| match format {
        Format::Csv => output::write_sweep_summary_csv(w, &sweep),
        Format::Json => output::write_sweep_summary_json(w, &sweep),
    })?;
    println!(
        "wrote {} series files and {}",
        sweep.runs.len(),
        summary_path.display()
    );
    Ok(())
}

fn cmd_validate(source: &SourceArgs) -> Result<(), CliError> {
    let sc = load_scenario(source)?;
    sc.validated().map_err(from_model)?;
    let (model, h_i) =
        lindblad::LindbladModel::from_block_system(&sc.system).map_err(from_lindblad)?;
    let psi0 = sc.initial_state().map_err(from_model)?;
    let psi0_full = psi0.embed(model.dim_total(), 0);
    let rho0 = lindblad::DensityMatrix::from_pure(&psi0_full);
    let step = VALIDATE_T_MAX / VALIDATE_STEPS as f64;
    let times: Vec<f64> = (0..=VALIDATE_STEPS).map(|k| k as f64 * step).collect();
    let distance =
        lindblad::equivalence_check(&model, &h_i, &rho0, &times).map_err(from_lindblad)?;
    println!("max trace distance: {distance:.3e}");
    if distance <= EQUIVALENCE_THRESHOLD {
        println!("PASS (threshold {EQUIVALENCE_THRESHOLD:.0e})");
        Ok(())
    } else {
        Err(CliError::EquivalenceFailed { distance })
    }
}

fn cmd_bound(source: &SourceArgs, out: Option<&Path>) -> Result<(), CliError> {
    let sc = load_scenario(source)?;
    let run = experiments::run_scenario(&sc).map_err(from_experiment)?;
    write_with(out, |w| output::write_bound_csv(w, &run))?;
    if let Some(path) = out {
        println!("wrote {} rows to {}", run.series.times.len(), path.display());
    }
    Ok(())
}

fn cmd_presets() {
    println!("available presets:");
    for name in experiments::preset_names() {
        let sc = experiments::preset(name).expect("built-in preset");
        let (p_a, theta) = match sc.initial {
            crate::model::InitialState::WeightAngle { p_a, theta } => (p_a, theta),
            _ => (0.0, 0.0),
        };
        println!(
            "  {name}: dim_A={}, g={}, Gamma3={}, p_A={p_a}, theta={theta:.4}, sweep={:?}",
            sc.system.dim_a,
            sc.system.b_block.get(0, 1).re,
            sc.system.gammas_a[0],
            sc.sweep.as_ref().map(|s| &s.values).unwrap()
        );
    }
}
