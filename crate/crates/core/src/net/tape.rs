//! Reverse-mode differentiation of losses built from jet passes.
//!
//! A [`Tape`] records every batched forward pass made while a loss is being
//! evaluated. The caller then seeds each pass with the adjoint of the loss
//! with respect to that pass's output jets, and [`Tape::backward`] sweeps the
//! recorded affine and activation blocks in reverse to produce `dLoss/dθ`.

use ndarray::{linalg::general_mat_mul, Array1, Array2};

use super::jet::{ensure_shape, propagate_into, PassRecord};
use super::{ActivationDerivs, JetBatch, JetOrder, NetError, NetworkParams};

/// Handle for one recorded forward pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassId(usize);

/// Buffers of earlier tapes, handed to a new tape so repeated loss
/// evaluations on the same point sets do not reallocate.
#[derive(Debug, Default)]
pub struct TapeWorkspace {
    records: Vec<PassRecord>,
}

pub struct Tape<'p> {
    params: &'p NetworkParams,
    records: Vec<PassRecord>,
    used: usize,
    seeds: Vec<Option<JetBatch>>,
}

impl<'p> Tape<'p> {
    pub fn new(params: &'p NetworkParams) -> Self {
        Tape::with_workspace(params, TapeWorkspace::default())
    }

    pub fn with_workspace(params: &'p NetworkParams, workspace: TapeWorkspace) -> Self {
        Tape {
            params,
            records: workspace.records,
            used: 0,
            seeds: Vec::new(),
        }
    }

    /// Gives the pass buffers back for reuse.
    pub fn into_workspace(self) -> TapeWorkspace {
        TapeWorkspace { records: self.records }
    }

    pub fn params(&self) -> &NetworkParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.used
    }

    pub fn is_empty(&self) -> bool {
        self.used == 0
    }

    /// Evaluates the network on `points` and records the pass.
    pub fn forward(&mut self, points: &[[f64; 3]], order: JetOrder) -> (PassId, JetBatch) {
        if self.used == self.records.len() {
            self.records.push(PassRecord::default());
        }
        let rec = &mut self.records[self.used];
        propagate_into(self.params, points, order, rec);
        let id = PassId(self.used);
        self.used += 1;
        self.seeds.push(None);
        (id, JetBatch::from_row(rec.output().row(0), points.len(), order))
    }

    /// Sets `dLoss/d(output jet)` for a pass. Unseeded passes contribute
    /// nothing to the gradient.
    pub fn seed(&mut self, pass: PassId, adjoint: JetBatch) -> Result<(), NetError> {
        if pass.0 >= self.used {
            return Err(NetError::UnknownPass);
        }
        let rec = &self.records[pass.0];
        if adjoint.len() != rec.n || adjoint.order() != rec.order() {
            return Err(NetError::SeedShape {
                expected: (rec.n, rec.order()),
                got: (adjoint.len(), adjoint.order()),
            });
        }
        self.seeds[pass.0] = Some(adjoint);
        Ok(())
    }

    /// Gradient of the seeded loss with respect to the flattened parameters
    /// (same layout as [`NetworkParams::to_flat`]).
    pub fn backward(&mut self) -> Result<Vec<f64>, NetError> {
        if self.used == 0 {
            return Err(NetError::EmptyTape);
        }
        let layers = self.params.layers();
        let depth = layers.len();
        let mut w_grads: Vec<Array2<f64>> = layers.iter().map(|l| Array2::zeros(l.weights.raw_dim())).collect();
        let mut b_grads: Vec<Array1<f64>> = layers.iter().map(|l| Array1::zeros(l.bias.len())).collect();

        for (rec, seed) in self.records[..self.used].iter_mut().zip(&self.seeds) {
            let Some(seed) = seed else { continue };
            let n = rec.n;
            let order = rec.order();
            rec.abar.resize_with(depth, || Array2::zeros((0, 0)));
            rec.ybar.resize_with(depth, || Array2::zeros((0, 0)));
            let top = &mut rec.abar[depth - 1];
            ensure_shape(top, (1, seed.as_slice().len()));
            top.as_slice_mut()
                .expect("standard layout")
                .copy_from_slice(seed.as_slice());
            for l in (0..depth).rev() {
                let abar = &rec.abar[l];
                general_mat_mul(1.0, abar, &rec.inputs[l].t(), 1.0, &mut w_grads[l]);
                for (bg, row) in b_grads[l].iter_mut().zip(abar.rows()) {
                    *bg += row.as_slice().expect("standard layout")[..n].iter().sum::<f64>();
                }
                if l == 0 {
                    break;
                }
                let ybar = &mut rec.ybar[l];
                ensure_shape(ybar, (layers[l].weights.ncols(), abar.ncols()));
                general_mat_mul(1.0, &layers[l].weights.t(), abar, 0.0, ybar);
                let (below, _) = rec.abar.split_at_mut(l);
                activation_adjoint(
                    &rec.derivs[l - 1],
                    &rec.pre[l - 1],
                    &rec.ybar[l],
                    &mut below[l - 1],
                    n,
                    order,
                );
            }
        }

        let mut grad = Vec::with_capacity(self.params.n_params());
        for (w, b) in w_grads.iter().zip(&b_grads) {
            grad.extend(w.iter());
            grad.extend(b.iter());
        }
        Ok(grad)
    }
}

/// Pulls output adjoints of `y = σ(a)` (applied channel-wise as a jet) back
/// to adjoints of the pre-activation block.
fn activation_adjoint(
    derivs: &[ActivationDerivs],
    a: &Array2<f64>,
    ybar: &Array2<f64>,
    abar: &mut Array2<f64>,
    n: usize,
    order: JetOrder,
) {
    ensure_shape(abar, a.dim());
    let rows = a.rows().into_iter().zip(ybar.rows()).zip(abar.rows_mut());
    for (((arow, yrow), mut out), dr) in rows.zip(derivs.chunks(n.max(1))) {
        let ar = arow.as_slice().expect("standard layout");
        let yb = yrow.as_slice().expect("standard layout");
        let ob = out.as_slice_mut().expect("standard layout");
        for j in 0..n {
            ob[j] = yb[j] * dr[j].d1;
        }
        if order == JetOrder::Value {
            continue;
        }
        for k in 0..3 {
            let g = (1 + k) * n;
            if order == JetOrder::Full {
                let l = (4 + k) * n;
                for j in 0..n {
                    let d = &dr[j];
                    let (ap, gbar, app, lbar) = (ar[g + j], yb[g + j], ar[l + j], yb[l + j]);
                    ob[j] += gbar * d.d2 * ap + lbar * (d.d3 * ap * ap + d.d2 * app);
                    ob[g + j] = gbar * d.d1 + 2.0 * lbar * d.d2 * ap;
                    ob[l + j] = lbar * d.d1;
                }
            } else {
                for j in 0..n {
                    let d = &dr[j];
                    ob[j] += yb[g + j] * d.d2 * ar[g + j];
                    ob[g + j] = yb[g + j] * d.d1;
                }
            }
        }
    }
}

/// Evaluates `loss_eval` on a fresh tape and returns the loss with its
/// parameter gradient.
///
/// `loss_eval` runs forward passes through the tape, seeds each pass with
/// the adjoint of its contribution, and returns the loss value.
pub fn loss_grad<F>(params: &NetworkParams, loss_eval: F) -> Result<(f64, Vec<f64>), NetError>
where
    F: FnOnce(&mut Tape<'_>) -> Result<f64, NetError>,
{
    loss_grad_in(params, &mut TapeWorkspace::default(), loss_eval)
}

/// As [`loss_grad`], reusing and refilling `workspace`.
pub fn loss_grad_in<F>(
    params: &NetworkParams,
    workspace: &mut TapeWorkspace,
    loss_eval: F,
) -> Result<(f64, Vec<f64>), NetError>
where
    F: FnOnce(&mut Tape<'_>) -> Result<f64, NetError>,
{
    let mut tape = Tape::with_workspace(params, std::mem::take(workspace));
    let result = loss_eval(&mut tape).and_then(|loss| Ok((loss, tape.backward()?)));
    *workspace = tape.into_workspace();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{forward, init_params, ActivationKind, Dense, NetworkSpec};
    use ndarray::{arr1, arr2};

    #[test]
    fn empty_tape_is_an_error() {
        let p = init_params(&NetworkSpec::scalar_field(vec![3], ActivationKind::Tanh, 0)).unwrap();
        let err = loss_grad(&p, |_| Ok(0.0)).unwrap_err();
        assert!(matches!(err, NetError::EmptyTape));
    }

    #[test]
    fn linear_least_squares_gradient() {
        let layer = Dense {
            weights: arr2(&[[0.5, -1.0, 2.0]]),
            bias: arr1(&[0.25]),
        };
        let p = NetworkParams::from_layers(vec![layer], ActivationKind::Tanh).unwrap();
        let x = [0.3, 0.6, 0.9];
        let c = 1.5;
        let (loss, grad) = loss_grad(&p, |tape| {
            let (id, out) = tape.forward(&[x], JetOrder::Value);
            let r = out.value(0) - c;
            let mut adj = JetBatch::zeros(1, JetOrder::Value);
            *adj.value_mut(0) = 2.0 * r;
            tape.seed(id, adj)?;
            Ok(r * r)
        })
        .unwrap();
        let r = 0.5 * 0.3 - 0.6 + 2.0 * 0.9 + 0.25 - c;
        assert!((loss - r * r).abs() < 1e-15);
        let expected = [2.0 * r * x[0], 2.0 * r * x[1], 2.0 * r * x[2], 2.0 * r];
        for (g, e) in grad.iter().zip(expected) {
            assert!((g - e).abs() < 1e-14, "{g} vs {e}");
        }
    }

    #[test]
    fn unused_parameter_has_zero_gradient() {
        // a hidden unit whose outgoing weight is zero does not affect the loss
        // through its incoming weights
        let hidden = Dense {
            weights: arr2(&[[1.0, 0.5, 0.0], [0.3, 0.2, 0.1]]),
            bias: arr1(&[0.0, 0.1]),
        };
        let out = Dense {
            weights: arr2(&[[1.0, 0.0]]),
            bias: arr1(&[0.0]),
        };
        let p = NetworkParams::from_layers(vec![hidden, out], ActivationKind::Tanh).unwrap();
        let (_, grad) = loss_grad(&p, |tape| {
            let (id, out) = tape.forward(&[[0.2, 0.4, 0.6]], JetOrder::Full);
            let mut adj = JetBatch::zeros(1, JetOrder::Full);
            *adj.value_mut(0) = 1.0;
            *adj.lap_mut(0, 0) = 1.0;
            tape.seed(id, adj)?;
            Ok(out.value(0) + out.lap(0, 0))
        })
        .unwrap();
        // second hidden row: weights at flat 3..6, bias at 7
        for i in [3, 4, 5, 7] {
            assert_eq!(grad[i], 0.0);
        }
        // input z has zero weight into the first unit but its gradient is live
        assert!(grad[0] != 0.0);
    }

    #[test]
    fn seed_shape_is_checked() {
        let p = init_params(&NetworkSpec::scalar_field(vec![3], ActivationKind::Tanh, 0)).unwrap();
        let mut tape = Tape::new(&p);
        let (id, _) = tape.forward(&[[0.0; 3], [1.0; 3]], JetOrder::Gradient);
        assert!(tape.seed(id, JetBatch::zeros(2, JetOrder::Full)).is_err());
        assert!(tape.seed(id, JetBatch::zeros(1, JetOrder::Gradient)).is_err());
        assert!(tape.seed(id, JetBatch::zeros(2, JetOrder::Gradient)).is_ok());
    }

    #[test]
    fn value_pass_gradient_matches_finite_differences() {
        let p = init_params(&NetworkSpec::scalar_field(vec![4, 3], ActivationKind::Sigmoid, 9)).unwrap();
        let x = [0.2, 0.7, 0.5];
        let (_, grad) = loss_grad(&p, |tape| {
            let (id, out) = tape.forward(&[x], JetOrder::Value);
            let mut adj = JetBatch::zeros(1, JetOrder::Value);
            *adj.value_mut(0) = 1.0;
            tape.seed(id, adj)?;
            Ok(out.value(0))
        })
        .unwrap();
        let theta = p.to_flat();
        let h = 1e-6;
        for i in 0..theta.len() {
            let mut tp = theta.clone();
            tp[i] += h;
            let mut tm = theta.clone();
            tm[i] -= h;
            let fd = (forward(&p.with_flat(&tp).unwrap(), x) - forward(&p.with_flat(&tm).unwrap(), x)) / (2.0 * h);
            assert!((fd - grad[i]).abs() < 1e-8, "param {i}: {fd} vs {}", grad[i]);
        }
    }
}
