use super::{MaterialModel, PhysicsError};
use crate::net::{forward_batch, forward_jet, JetOrder, JetTriple, NetworkParams};

/// Anything that can report its value, gradient and pure second derivatives.
pub trait ScalarField {
    fn jet(&self, x: [f64; 3]) -> JetTriple;

    fn jets(&self, points: &[[f64; 3]]) -> Vec<JetTriple> {
        points.iter().map(|&p| self.jet(p)).collect()
    }
}

impl ScalarField for NetworkParams {
    fn jet(&self, x: [f64; 3]) -> JetTriple {
        forward_jet(self, x)
    }

    fn jets(&self, points: &[[f64; 3]]) -> Vec<JetTriple> {
        let batch = forward_batch(self, points, JetOrder::Full);
        (0..points.len()).map(|j| batch.triple(j)).collect()
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn jet(&self, x: [f64; 3]) -> JetTriple {
        (**self).jet(x)
    }

    fn jets(&self, points: &[[f64; 3]]) -> Vec<JetTriple> {
        (**self).jets(points)
    }
}

/// Residual of `div(k grad phi) = 0` in expanded form,
/// `k * lap(phi) + grad(k) . grad(phi)`.
#[inline]
pub fn residual_from_jet(jet: &JetTriple, k: f64, grad_k: [f64; 3]) -> f64 {
    k * (jet.lap_diag[0] + jet.lap_diag[1] + jet.lap_diag[2])
        + (grad_k[0] * jet.grad[0] + grad_k[1] * jet.grad[1] + grad_k[2] * jet.grad[2])
}

pub fn pde_residual(field: &impl ScalarField, model: &MaterialModel, x: [f64; 3]) -> f64 {
    let (k, grad_k) = model.eval(x);
    residual_from_jet(&field.jet(x), k, grad_k)
}

pub const UNIT_NORMAL_TOL: f64 = 1e-9;

/// Flux `q = -k dphi/dn` through a surface with unit normal `n`.
pub fn flux(field: &impl ScalarField, model: &MaterialModel, x: [f64; 3], n: [f64; 3]) -> Result<f64, PhysicsError> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if !((norm - 1.0).abs() <= UNIT_NORMAL_TOL) {
        return Err(PhysicsError::NonUnitNormal { norm });
    }
    let (k, _) = model.eval(x);
    let g = field.jet(x).grad;
    Ok(-k * (g[0] * n[0] + g[1] * n[1] + g[2] * n[2]))
}
