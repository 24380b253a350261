//! Batch driver: reads a TOML scenario file, runs every scenario and writes
//! JSON bundles, CSV tables and plot series to an output directory.

pub mod bundle;
pub mod config;
pub mod output;
pub mod run;

use std::path::Path;

pub use bundle::ReportBundle;
pub use config::Config;
pub use run::Overrides;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    /// Malformed or inconsistent scenario file.
    Config(String),
    Io(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Exit status of a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean = 0,
    Failures = 1,
    Inconsistent = 2,
}

impl Outcome {
    pub fn of(bundles: &[ReportBundle]) -> Self {
        if bundles.iter().any(ReportBundle::failed) {
            Outcome::Failures
        } else if bundles.iter().any(ReportBundle::inconsistent) {
            Outcome::Inconsistent
        } else {
            Outcome::Clean
        }
    }
}

/// Resolves, runs and writes everything; returns the bundles in file order.
pub fn run(config: &Config, out: &Path, flags: &Overrides, threads: Option<usize>) -> Result<Vec<ReportBundle>, RunError> {
    let jobs = run::resolve(config, flags)?;
    let bundles = run::run_all(&jobs, threads)?;
    output::write_all(out, &bundles)?;
    Ok(bundles)
}
