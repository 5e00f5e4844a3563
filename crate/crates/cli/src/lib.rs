//! Experiment files, figure presets and CSV output for `irscoop`.
//!
//! The binary is a thin wrapper: `run <config>` parses an experiment file with
//! [`parse_config`] and hands it to [`run_spec`]; `preset <name>` calls [`run_preset`].

pub mod config;
pub mod output;
pub mod presets;
pub mod validate;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, render, ConfigError, ExperimentSpec, SweepSpec};
pub use presets::Preset;

use irscoop::sweep;
use output::{report_row, sweep_rows, write_checks, write_labelled, write_rows, Row};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "IRSCOOP_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl RunError {
    /// 1 for configuration problems, 2 for everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

impl From<irscoop::Error> for RunError {
    fn from(e: irscoop::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(format!("I/O: {e}"))
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        Self::Runtime(format!("CSV: {e}"))
    }
}

/// Files written by a run and any self-checks that failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub failed_checks: Vec<String>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failed_checks.is_empty() {
            0
        } else {
            2
        }
    }
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<(), RunError>) -> Result<(), RunError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, buf).map_err(|e| RunError::Runtime(format!("writing {}: {e}", path.display())))
}

/// Result rows of a non-preset spec.
pub fn spec_rows(spec: &ExperimentSpec) -> Result<Vec<Row>, RunError> {
    match &spec.sweep {
        Some(s) => {
            let points = sweep(&spec.base, s.axis, &s.core_values())?;
            sweep_rows(s.axis, &s.values, &points)
        }
        None => {
            let r = irscoop::run_campaign(&spec.base)?;
            Ok(vec![report_row(None, 0.0, &spec.base, &r)?])
        }
    }
}

/// Runs a spec and writes its CSV, or the preset's files into `outputs`.
pub fn run_spec(spec: &ExperimentSpec) -> Result<RunSummary, RunError> {
    if let Some(p) = spec.preset {
        return run_preset(p, &spec.outputs, spec.base.seed, None);
    }
    let rows = spec_rows(spec)?;
    write_file(&spec.outputs, |b| write_rows(b, &rows))?;
    Ok(RunSummary {
        files: vec![spec.outputs.clone()],
        failed_checks: Vec::new(),
    })
}

/// Runs a preset into `dir`. `slots` overrides every campaign's slot count.
pub fn run_preset(preset: Preset, dir: &Path, seed: u64, slots: Option<u64>) -> Result<RunSummary, RunError> {
    fs::create_dir_all(dir)?;
    let mut summary = RunSummary::default();
    for job in preset.jobs(seed, slots) {
        let rows = spec_rows(&job)?;
        let path = dir.join(&job.outputs);
        write_file(&path, |b| write_rows(b, &rows))?;
        summary.files.push(path);
    }
    match preset {
        Preset::Fig5 => {
            let mut rows = Vec::new();
            for (i, (label, mut cfg)) in presets::fig5_points().into_iter().enumerate() {
                cfg.seed = seed;
                if let Some(s) = slots {
                    cfg.slots = s;
                }
                let r = irscoop::run_campaign(&cfg)?;
                rows.push((label.to_string(), report_row(None, i as f64, &cfg, &r)?));
            }
            let path = dir.join("fig5_points.csv");
            write_file(&path, |b| write_labelled(b, "label", &rows))?;
            summary.files.push(path);
        }
        Preset::Validate => {
            let checks = validate::validation_checks(seed, slots.unwrap_or(presets::VALIDATION_SLOTS))?;
            summary.failed_checks = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            let path = dir.join("validate.csv");
            write_file(&path, |b| write_checks(b, &checks))?;
            summary.files.push(path);
        }
        _ => {}
    }
    Ok(summary)
}

/// Reads the worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>, ConfigError> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::new(WORKERS_ENV, format!("expected a positive integer, got `{v}`"))),
        },
    }
}
