//! Run configuration, file outputs and the `train`, `sample`, `evaluate` and
//! `bench` workflows behind the `dcm` binary.

mod config;
pub mod output;
mod run;

use std::path::{Path, PathBuf};

pub use config::{parse_config, ConfigDocument, ConfigError, RunConfig};
pub use run::{
    collocation_set, execute, matrix_csv, network_spec, run_evaluate, run_matrix, run_sample, run_train, variants,
    EvaluationSummary, MatrixRow, RunOptions, RunOutcome, RunSummary, Schedule, Variant, VaryAxis, DEFAULT_FACE_COUNTS,
    DEFAULT_INTERIOR_COUNTS, DEFAULT_MAX_DEPTH, LOCK_FILE, MATRIX_HEADER,
};

use crate::bench::BenchError;
use crate::net::NetError;
use crate::optim::OptimError;
use crate::physics::PhysicsError;
use crate::sampling::SamplingError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Invalid(String),
    #[error("training diverged in {phase} phase at iteration {iter}")]
    Diverged { iter: usize, phase: &'static str },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output directory {0} is in use by another run")]
    Locked(PathBuf),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for divergence, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Diverged { .. } => 3,
            CliError::Io { .. } | CliError::Locked(_) => 4,
        }
    }
}

impl From<OptimError> for CliError {
    fn from(e: OptimError) -> Self {
        match e {
            OptimError::NonFiniteLoss { iter, phase, .. } => CliError::Diverged {
                iter,
                phase: phase.name(),
            },
            other => CliError::Invalid(other.to_string()),
        }
    }
}

macro_rules! invalid_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Invalid(e.to_string())
            }
        }
    )*};
}

invalid_from!(BenchError, NetError, PhysicsError, SamplingError);
