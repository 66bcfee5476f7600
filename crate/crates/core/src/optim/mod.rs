//! Adam and L-BFGS over the flattened parameter vector, and the combined
//! training schedule.

mod adam;
mod lbfgs;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use lbfgs::{
    lbfgs_minimize, lbfgs_minimize_with, Evaluation, LbfgsConfig, LbfgsIter, LbfgsResult, LbfgsStatus,
    MAX_LINE_SEARCH_TRIALS,
};
pub use train::{train, train_with, IterRecord, Phase, TrainHistory};

use crate::net::{NetError, NetworkParams};
use crate::physics::PhysicsError;

#[derive(Debug, thiserror::Error)]
pub enum OptimError {
    #[error("invalid optimizer config: {0}")]
    InvalidConfig(String),
    #[error("expected a vector of length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("gradient entry {index} is {value}")]
    NonFiniteGradient { index: usize, value: f64 },
    #[error("loss became non-finite at {} iteration {iter}", phase.name())]
    NonFiniteLoss {
        iter: usize,
        phase: Phase,
        last_finite: Box<NetworkParams>,
    },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error(transparent)]
    Net(#[from] NetError),
}
