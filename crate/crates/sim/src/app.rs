//! The commands behind the CLI.

use std::fs;
use std::path::{Path, PathBuf};

use hrom_core::gait::{build_trot_schedule, LegWorkspace};
use hrom_core::metrics::{compute_metrics, Metrics};
use hrom_core::sim::{run_simulation, ControllerMode, SimError, SimLog};
use thiserror::Error;

use crate::blocks::render_schedule;
use crate::config::{load_scenario, ConfigFileError, Scenario};
use crate::logcsv::{read_samples_file, write_log_file, LogError};
use crate::summary::render_metrics;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_CONVERGENCE: u8 = 3;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("{0}")]
    Config(#[from] ConfigFileError),
    #[error("{0}")]
    Simulation(#[from] SimError),
    #[error("{path}: {source}")]
    Output { path: PathBuf, source: LogError },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: LogError },
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) | AppError::Simulation(SimError::Config(_)) => EXIT_CONFIG,
            AppError::Simulation(SimError::Runtime { .. }) | AppError::Output { .. } | AppError::Input { .. } => EXIT_RUNTIME,
        }
    }
}

/// Command-line overrides; each wins over the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub mode: Option<ControllerMode>,
    pub duration: Option<f64>,
}

pub struct RunReport {
    pub log: SimLog,
    pub metrics: Metrics,
    pub summary: String,
    pub out_dir: PathBuf,
}

pub fn apply_overrides(scenario: &mut Scenario, overrides: &Overrides) {
    if let Some(mode) = overrides.mode {
        scenario.config.mode = mode;
    }
    if let Some(d) = overrides.duration {
        scenario.config.duration = d;
    }
    if let Some(out) = &overrides.out {
        scenario.output_dir = Some(out.clone());
    }
}

/// Runs a scenario and writes `log.csv` and `summary.txt` into the output
/// directory (`--out`, else `output.dir`, else `out`).
pub fn run(config_path: &Path, overrides: &Overrides) -> Result<RunReport, AppError> {
    let mut scenario = load_scenario(config_path)?;
    apply_overrides(&mut scenario, overrides);
    let log = run_simulation(&scenario.config)?;
    let metrics = log.metrics().expect("a valid scenario logs at least one step");

    let out_dir = scenario.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let io = |path: &Path, e: std::io::Error| AppError::Output { path: path.to_owned(), source: LogError::Io(e) };
    fs::create_dir_all(&out_dir).map_err(|e| io(&out_dir, e))?;
    let csv_path = out_dir.join("log.csv");
    write_log_file(&log, &csv_path).map_err(|source| AppError::Output { path: csv_path.clone(), source })?;

    let c = &scenario.config;
    let mut summary = format!(
        "mode = {}\nsteps = {}\ndt = {}\nmpc_solves = {}\nfoot_clearance = {}\nclearance_ok = {}\n",
        c.mode.label(),
        log.steps,
        c.dt,
        log.mpc_solves,
        c.foot_clearance,
        metrics.min_foot_separation >= c.foot_clearance,
    );
    summary.push_str(&render_metrics(&metrics));
    let summary_path = out_dir.join("summary.txt");
    fs::write(&summary_path, &summary).map_err(|e| io(&summary_path, e))?;
    Ok(RunReport { log, metrics, summary, out_dir })
}

/// Recomputes the summary of a written log.
pub fn metrics(log_path: &Path) -> Result<String, AppError> {
    let samples = read_samples_file(log_path).map_err(|source| AppError::Input { path: log_path.to_owned(), source })?;
    let m = compute_metrics(&samples).expect("reader rejects empty logs");
    Ok(render_metrics(&m))
}

/// The scenario's gait schedule in the block text format.
pub fn gait_blocks(config_path: &Path) -> Result<String, AppError> {
    let scenario = load_scenario(config_path)?;
    let c = &scenario.config;
    let schedule = build_trot_schedule(&c.gait, &LegWorkspace::from(&c.robot)).map_err(|e| SimError::Config(e.into()))?;
    Ok(render_schedule(&schedule))
}
