//! Std companion to `stabsec-core`: file formats, the Monte Carlo experiment
//! harness, summary statistics and the acceptance check suites.

pub mod checks;
pub mod experiment;
pub mod formats;
pub mod stats;

use std::path::PathBuf;

pub use experiment::{
    prepare, run_experiment, trial_seed, write_csv, ArrivalSpec, ExperimentConfig, ExperimentOutcome,
    ExperimentRecord, Prepared, Summary, TrialRun,
};
pub use formats::WeightsSpec;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] stabsec_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}
