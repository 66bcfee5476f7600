//! Graded conductivity, PDE and boundary residuals, and the collocation loss.

mod bcs;
mod field;
mod loss;
mod material;

pub use bcs::attach_case_bcs;
pub use field::{flux, pde_residual, residual_from_jet, ScalarField, UNIT_NORMAL_TOL};
pub use loss::{assemble_field_loss, assemble_loss, LossProblem, LossReport};
pub use material::{conductivity, Axis, MaterialModel};

use crate::net::NetError;

#[derive(Debug, thiserror::Error)]
pub enum PhysicsError {
    #[error("normal vector has norm {norm}, expected 1")]
    NonUnitNormal { norm: f64 },
    #[error("collocation set has no interior points")]
    EmptyInterior,
    #[error("case {case} does not use geometry {geometry}")]
    GeometryMismatch { case: &'static str, geometry: String },
    #[error("conductivity {k} at {point:?} is not positive")]
    NonPositiveConductivity { point: [f64; 3], k: f64 },
    #[error(transparent)]
    Net(#[from] NetError),
}
