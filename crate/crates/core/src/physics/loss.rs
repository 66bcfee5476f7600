//! The three-part mean-square collocation loss.

use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::field::residual_from_jet;
use super::{MaterialModel, PhysicsError, ScalarField};
use crate::net::{loss_grad_in, JetBatch, JetOrder, NetworkParams, Tape, TapeWorkspace};
use crate::sampling::CollocationSet;

/// Total loss and its components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub total: f64,
    /// Mean squared PDE residual over interior points.
    pub mse_g: f64,
    /// Mean squared Dirichlet mismatch.
    pub mse_d: f64,
    /// Mean squared Neumann flux mismatch.
    pub mse_n: f64,
    pub n_interior: usize,
    pub n_dirichlet: usize,
    pub n_neumann: usize,
}

impl LossReport {
    fn new(mse_g: f64, mse_d: f64, mse_n: f64, counts: (usize, usize, usize)) -> Self {
        LossReport {
            total: mse_g + mse_d + mse_n,
            mse_g,
            mse_d,
            mse_n,
            n_interior: counts.0,
            n_dirichlet: counts.1,
            n_neumann: counts.2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

/// A collocation set with conductivity data precomputed, ready to be
/// evaluated many times during training.
#[derive(Debug)]
pub struct LossProblem {
    interior: Vec<[f64; 3]>,
    k: Vec<f64>,
    grad_k: Vec<[f64; 3]>,
    dirichlet: Vec<[f64; 3]>,
    dirichlet_values: Vec<f64>,
    neumann: Vec<[f64; 3]>,
    /// `k * n` at each Neumann point, so that `q = -(k n) . grad(phi)`.
    neumann_kn: Vec<[f64; 3]>,
    neumann_flux: Vec<f64>,
    workspace: Mutex<TapeWorkspace>,
}

#[inline]
fn mean(sum: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

impl LossProblem {
    pub fn new(model: &MaterialModel, set: &CollocationSet) -> Result<Self, PhysicsError> {
        if set.interior.is_empty() {
            return Err(PhysicsError::EmptyInterior);
        }
        let (k, grad_k) = set.interior.iter().map(|&p| model.eval(p)).unzip();
        let neumann_kn = set
            .neumann
            .iter()
            .map(|np| {
                let (k, _) = model.eval(np.point);
                np.normal.map(|c| k * c)
            })
            .collect();
        Ok(LossProblem {
            interior: set.interior.clone(),
            k,
            grad_k,
            dirichlet: set.dirichlet.iter().map(|d| d.point).collect(),
            dirichlet_values: set.dirichlet.iter().map(|d| d.value).collect(),
            neumann: set.neumann.iter().map(|n| n.point).collect(),
            neumann_kn,
            neumann_flux: set.neumann.iter().map(|n| n.flux).collect(),
            workspace: Mutex::new(TapeWorkspace::default()),
        })
    }

    fn counts(&self) -> (usize, usize, usize) {
        (self.interior.len(), self.dirichlet.len(), self.neumann.len())
    }

    #[inline]
    fn neumann_flux_pred(&self, j: usize, grad: [f64; 3]) -> f64 {
        let kn = self.neumann_kn[j];
        -(kn[0] * grad[0] + kn[1] * grad[1] + kn[2] * grad[2])
    }

    fn interior_sum(&self, jets: &JetBatch) -> f64 {
        (0..self.interior.len())
            .map(|j| residual_from_jet(&jets.triple(j), self.k[j], self.grad_k[j]).powi(2))
            .sum()
    }

    fn dirichlet_sum(&self, out: &JetBatch) -> f64 {
        (0..self.dirichlet.len())
            .map(|j| (out.value(j) - self.dirichlet_values[j]).powi(2))
            .sum()
    }

    fn neumann_sum(&self, out: &JetBatch) -> f64 {
        (0..self.neumann.len())
            .map(|j| {
                let g = [out.grad(j, 0), out.grad(j, 1), out.grad(j, 2)];
                (self.neumann_flux_pred(j, g) - self.neumann_flux[j]).powi(2)
            })
            .sum()
    }

    /// Loss of a network. Produces bit-identical values to
    /// [`LossProblem::loss_and_grad`].
    pub fn evaluate(&self, params: &NetworkParams) -> LossReport {
        let n = self.counts();
        let mut workspace = self.workspace.lock().unwrap_or_else(|e| e.into_inner());
        let mut tape = Tape::with_workspace(params, std::mem::take(&mut *workspace));
        let mse_g = mean(self.interior_sum(&tape.forward(&self.interior, JetOrder::Full).1), n.0);
        let mse_d = if self.dirichlet.is_empty() {
            0.0
        } else {
            mean(
                self.dirichlet_sum(&tape.forward(&self.dirichlet, JetOrder::Value).1),
                n.1,
            )
        };
        let mse_n = if self.neumann.is_empty() {
            0.0
        } else {
            mean(
                self.neumann_sum(&tape.forward(&self.neumann, JetOrder::Gradient).1),
                n.2,
            )
        };
        *workspace = tape.into_workspace();
        LossReport::new(mse_g, mse_d, mse_n, n)
    }

    /// Loss of an arbitrary field, evaluated point by point.
    pub fn evaluate_field(&self, field: &dyn ScalarField) -> LossReport {
        let n = self.counts();
        let g: f64 = (0..n.0)
            .map(|j| residual_from_jet(&field.jet(self.interior[j]), self.k[j], self.grad_k[j]).powi(2))
            .sum();
        let d: f64 = (0..n.1)
            .map(|j| (field.jet(self.dirichlet[j]).value - self.dirichlet_values[j]).powi(2))
            .sum();
        let q: f64 = (0..n.2)
            .map(|j| (self.neumann_flux_pred(j, field.jet(self.neumann[j]).grad) - self.neumann_flux[j]).powi(2))
            .sum();
        LossReport::new(mean(g, n.0), mean(d, n.1), mean(q, n.2), n)
    }

    /// Loss and its gradient with respect to the flattened network parameters.
    pub fn loss_and_grad(&self, params: &NetworkParams) -> Result<(LossReport, Vec<f64>), PhysicsError> {
        let mut report = None;
        let mut workspace = self.workspace.lock().unwrap_or_else(|e| e.into_inner());
        let (_, grad) = loss_grad_in(params, &mut workspace, |tape: &mut Tape<'_>| {
            let n = self.counts();
            let (id, jets) = tape.forward(&self.interior, JetOrder::Full);
            let mse_g = mean(self.interior_sum(&jets), n.0);
            let mut adj = JetBatch::zeros(n.0, JetOrder::Full);
            let scale = 2.0 / n.0 as f64;
            for j in 0..n.0 {
                let r = residual_from_jet(&jets.triple(j), self.k[j], self.grad_k[j]);
                let c = scale * r;
                for axis in 0..3 {
                    *adj.lap_mut(j, axis) = c * self.k[j];
                    *adj.grad_mut(j, axis) = c * self.grad_k[j][axis];
                }
            }
            tape.seed(id, adj)?;

            let mut mse_d = 0.0;
            if n.1 > 0 {
                let (id, out) = tape.forward(&self.dirichlet, JetOrder::Value);
                mse_d = mean(self.dirichlet_sum(&out), n.1);
                let mut adj = JetBatch::zeros(n.1, JetOrder::Value);
                let scale = 2.0 / n.1 as f64;
                for j in 0..n.1 {
                    *adj.value_mut(j) = scale * (out.value(j) - self.dirichlet_values[j]);
                }
                tape.seed(id, adj)?;
            }

            let mut mse_n = 0.0;
            if n.2 > 0 {
                let (id, out) = tape.forward(&self.neumann, JetOrder::Gradient);
                mse_n = mean(self.neumann_sum(&out), n.2);
                let mut adj = JetBatch::zeros(n.2, JetOrder::Gradient);
                let scale = 2.0 / n.2 as f64;
                for j in 0..n.2 {
                    let g = [out.grad(j, 0), out.grad(j, 1), out.grad(j, 2)];
                    let e = self.neumann_flux_pred(j, g) - self.neumann_flux[j];
                    for axis in 0..3 {
                        *adj.grad_mut(j, axis) = -scale * e * self.neumann_kn[j][axis];
                    }
                }
                tape.seed(id, adj)?;
            }
            let r = LossReport::new(mse_g, mse_d, mse_n, n);
            report = Some(r);
            Ok(r.total)
        })?;
        Ok((report.expect("loss closure ran"), grad))
    }
}

/// Mean-square loss of a network on a collocation set with attached
/// boundary values.
pub fn assemble_loss(
    params: &NetworkParams,
    model: &MaterialModel,
    set: &CollocationSet,
) -> Result<LossReport, PhysicsError> {
    Ok(LossProblem::new(model, set)?.evaluate(params))
}

/// Same loss for an arbitrary field (for example a closed-form solution).
pub fn assemble_field_loss(
    field: &dyn ScalarField,
    model: &MaterialModel,
    set: &CollocationSet,
) -> Result<LossReport, PhysicsError> {
    Ok(LossProblem::new(model, set)?.evaluate_field(field))
}
