//! Experiment runner for cache-enabled multi-antenna small-cell networks:
//! configuration, parallel Monte Carlo, CSV export and the validation gate.

pub mod checks;
pub mod commands;
pub mod config;
pub mod mc;
pub mod output;
pub mod validate;

use multicache_core::analysis::AnalysisError;
use multicache_core::content::ContentError;
use multicache_core::network::ModelError;
use multicache_core::optimizer::OptimizerError;
use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, Overrides};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error(transparent)]
    Content(#[from] ContentError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => EXIT_CONFIG,
            _ => EXIT_VALIDATION,
        }
    }
}
