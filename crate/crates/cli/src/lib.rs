//! Batch runner for the `subdyn` experiments: configuration, execution and
//! artifact output. The binary in `main.rs` is a thin argument layer.

// `!(x > 0.0)` style checks deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod config;
pub mod experiment;

use std::path::{Path, PathBuf};

use config::{ExperimentConfig, Overrides, Prepared, ValidationError};
use experiment::Artifacts;

/// Exit status for configuration problems.
pub const EXIT_INVALID: i32 = 2;
/// Exit status for failures during a run.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Invalid(#[from] ValidationError),
    #[error("run failed: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Loads a config file, applies flag overrides and validates.
pub fn prepare(path: &Path, overrides: &Overrides) -> Result<Prepared, CliError> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    cfg.apply(overrides);
    Ok(cfg.prepare()?)
}

pub fn output_dir(prepared: &Prepared) -> PathBuf {
    prepared
        .config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes `trace.csv` and `summary.json` into `dir`.
pub fn write_artifacts(dir: &Path, art: &Artifacts) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(runtime)?;
    std::fs::write(dir.join("trace.csv"), &art.trace_csv).map_err(runtime)?;
    let mut summary = serde_json::to_string_pretty(&art.summary).map_err(runtime)?;
    summary.push('\n');
    std::fs::write(dir.join("summary.json"), summary).map_err(runtime)?;
    Ok(())
}

/// One run; nothing is written unless the run completes.
pub fn run_to(prepared: &Prepared, dir: &Path) -> Result<Artifacts, CliError> {
    let art = experiment::run(prepared).map_err(runtime)?;
    write_artifacts(dir, &art)?;
    Ok(art)
}

/// Parses `A..B` (half-open) or `A..=B`.
pub fn parse_seed_range(s: &str) -> Result<Vec<u64>, String> {
    let (a, b, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        return Err(format!("expected A..B or A..=B, got '{s}'"));
    };
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|e| format!("bad range start '{a}': {e}"))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|e| format!("bad range end '{b}': {e}"))?;
    let seeds: Vec<u64> = if inclusive {
        (a..=b).collect()
    } else {
        (a..b).collect()
    };
    if seeds.is_empty() {
        return Err(format!("seed range '{s}' is empty"));
    }
    Ok(seeds)
}
