//! Dense feedforward networks with exact input jets and parameter gradients.

mod activation;
mod jet;
mod params;
mod tape;

pub use activation::{activation_eval, ActivationDerivs, ActivationKind};
pub use jet::{forward, forward_batch, forward_jet, JetBatch, JetOrder, JetTriple};
pub use params::{init_params, Dense, NetworkParams, NetworkSpec};
pub use tape::{loss_grad, loss_grad_in, PassId, Tape, TapeWorkspace};

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("unknown activation `{0}`")]
    UnknownActivation(String),
    #[error("no forward pass recorded on the tape")]
    EmptyTape,
    #[error("pass id does not belong to this tape")]
    UnknownPass,
    #[error("seed shape {got:?} does not match pass shape {expected:?}")]
    SeedShape {
        expected: (usize, JetOrder),
        got: (usize, JetOrder),
    },
    #[error("malformed parameter snapshot: {0}")]
    Snapshot(String),
}
