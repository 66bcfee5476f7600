//! Forward propagation of second-order jets through a dense network.
//!
//! A batch of `n` points is carried as one matrix per layer with
//! `width` rows and `channels * n` columns. Channel 0 holds values, channels
//! `1..=3` the first derivatives with respect to each input coordinate and,
//! for [`JetOrder::Full`], channels `4..=6` the pure second derivatives.
//! Every channel passes through the same weight matrix, so one GEMM per layer
//! moves the whole jet.

use ndarray::{linalg::general_mat_mul, Array2, ArrayView1};

use super::{ActivationDerivs, ActivationKind, NetworkParams};

/// How much of the jet a pass carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JetOrder {
    Value,
    Gradient,
    Full,
}

impl JetOrder {
    pub fn channels(self) -> usize {
        match self {
            JetOrder::Value => 1,
            JetOrder::Gradient => 4,
            JetOrder::Full => 7,
        }
    }
}

/// Value, gradient and pure second derivatives of a scalar field at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JetTriple {
    pub value: f64,
    pub grad: [f64; 3],
    pub lap_diag: [f64; 3],
}

impl JetTriple {
    pub fn laplacian(&self) -> f64 {
        self.lap_diag[0] + self.lap_diag[1] + self.lap_diag[2]
    }
}

/// Scalar network output (or its adjoint) for a batch of points.
#[derive(Debug, Clone, PartialEq)]
pub struct JetBatch {
    n: usize,
    order: JetOrder,
    data: Vec<f64>,
}

impl JetBatch {
    pub fn zeros(n: usize, order: JetOrder) -> Self {
        JetBatch {
            n,
            order,
            data: vec![0.0; n * order.channels()],
        }
    }

    pub(crate) fn from_row(row: ArrayView1<'_, f64>, n: usize, order: JetOrder) -> Self {
        debug_assert_eq!(row.len(), n * order.channels());
        JetBatch {
            n,
            order,
            data: row.to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn order(&self) -> JetOrder {
        self.order
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.data[j]
    }

    /// Panics if the batch carries no gradient channels.
    #[inline]
    pub fn grad(&self, j: usize, axis: usize) -> f64 {
        assert!(self.order >= JetOrder::Gradient, "batch has no gradient channels");
        self.data[(1 + axis) * self.n + j]
    }

    /// Panics unless the batch carries second derivatives.
    #[inline]
    pub fn lap(&self, j: usize, axis: usize) -> f64 {
        assert!(self.order == JetOrder::Full, "batch has no second-derivative channels");
        self.data[(4 + axis) * self.n + j]
    }

    #[inline]
    pub fn value_mut(&mut self, j: usize) -> &mut f64 {
        &mut self.data[j]
    }

    #[inline]
    pub fn grad_mut(&mut self, j: usize, axis: usize) -> &mut f64 {
        assert!(self.order >= JetOrder::Gradient, "batch has no gradient channels");
        &mut self.data[(1 + axis) * self.n + j]
    }

    #[inline]
    pub fn lap_mut(&mut self, j: usize, axis: usize) -> &mut f64 {
        assert!(self.order == JetOrder::Full, "batch has no second-derivative channels");
        &mut self.data[(4 + axis) * self.n + j]
    }

    /// Missing channels read as zero.
    pub fn triple(&self, j: usize) -> JetTriple {
        let mut t = JetTriple {
            value: self.value(j),
            ..JetTriple::default()
        };
        if self.order >= JetOrder::Gradient {
            for k in 0..3 {
                t.grad[k] = self.grad(j, k);
            }
        }
        if self.order == JetOrder::Full {
            for k in 0..3 {
                t.lap_diag[k] = self.lap(j, k);
            }
        }
        t
    }
}

/// Blocks of one forward pass, kept for the reverse sweep and reused across
/// passes of the same shape.
#[derive(Debug, Default)]
pub(crate) struct PassRecord {
    pub n: usize,
    pub order: Option<JetOrder>,
    /// Input block of every layer (`inputs[0]` is the seeded coordinate block).
    pub inputs: Vec<Array2<f64>>,
    /// Pre-activation block of every layer; the last one is the output.
    pub pre: Vec<Array2<f64>>,
    /// Activation derivatives at the value channel of every hidden layer,
    /// `width x n` row-major.
    pub derivs: Vec<Vec<ActivationDerivs>>,
    /// Adjoint buffers for the reverse sweep, one per layer.
    pub abar: Vec<Array2<f64>>,
    pub ybar: Vec<Array2<f64>>,
}

impl PassRecord {
    pub fn order(&self) -> JetOrder {
        self.order.expect("pass has been run")
    }

    pub fn output(&self) -> &Array2<f64> {
        self.pre.last().expect("pass has been run")
    }
}

/// Reshapes `buf` to `shape`, reallocating only when the shape changes.
/// Contents are unspecified afterwards.
pub(crate) fn ensure_shape(buf: &mut Array2<f64>, shape: (usize, usize)) {
    if buf.dim() != shape {
        *buf = Array2::zeros(shape);
    }
}

fn fill_input_block(y: &mut Array2<f64>, points: &[[f64; 3]], order: JetOrder) {
    let n = points.len();
    ensure_shape(y, (3, n * order.channels()));
    for k in 0..3 {
        let mut row = y.row_mut(k);
        let r = row.as_slice_mut().expect("standard layout");
        for (j, p) in points.iter().enumerate() {
            r[j] = p[k];
        }
        for c in 1..order.channels() {
            let seed = if c == 1 + k { 1.0 } else { 0.0 };
            r[c * n..(c + 1) * n].fill(seed);
        }
    }
}

fn affine_into(w: &Array2<f64>, b: ArrayView1<'_, f64>, y: &Array2<f64>, n: usize, a: &mut Array2<f64>) {
    ensure_shape(a, (w.nrows(), y.ncols()));
    general_mat_mul(1.0, w, y, 0.0, a);
    // only the value channel carries the bias
    for (mut row, &bi) in a.rows_mut().into_iter().zip(b.iter()) {
        row.as_slice_mut().expect("standard layout")[..n]
            .iter_mut()
            .for_each(|v| *v += bi);
    }
}

fn activate_into(
    kind: ActivationKind,
    a: &Array2<f64>,
    y: &mut Array2<f64>,
    derivs: &mut Vec<ActivationDerivs>,
    n: usize,
    order: JetOrder,
) {
    ensure_shape(y, a.dim());
    derivs.resize(a.nrows() * n, ActivationDerivs::default());
    for ((arow, mut yrow), dr) in a.rows().into_iter().zip(y.rows_mut()).zip(derivs.chunks_mut(n.max(1))) {
        let ar = arow.as_slice().expect("standard layout");
        let yr = yrow.as_slice_mut().expect("standard layout");
        for j in 0..n {
            dr[j] = kind.derivs(ar[j]);
            yr[j] = dr[j].value;
        }
        if order == JetOrder::Value {
            continue;
        }
        for k in 0..3 {
            let g = (1 + k) * n;
            for j in 0..n {
                yr[g + j] = dr[j].d1 * ar[g + j];
            }
            if order == JetOrder::Full {
                let l = (4 + k) * n;
                for j in 0..n {
                    let ap = ar[g + j];
                    yr[l + j] = dr[j].d2 * ap * ap + dr[j].d1 * ar[l + j];
                }
            }
        }
    }
}

/// Runs the network on a batch, leaving every block in `rec`. The output is
/// `rec.output()`, a `output_dim x channels*n` block.
pub(crate) fn propagate_into(params: &NetworkParams, points: &[[f64; 3]], order: JetOrder, rec: &mut PassRecord) {
    assert_eq!(params.input_dim(), 3, "jet propagation needs a 3-input network");
    let n = points.len();
    let layers = params.layers();
    let depth = layers.len();
    rec.n = n;
    rec.order = Some(order);
    rec.inputs.resize_with(depth, || Array2::zeros((0, 0)));
    rec.pre.resize_with(depth, || Array2::zeros((0, 0)));
    rec.derivs.resize_with(depth - 1, Vec::new);
    fill_input_block(&mut rec.inputs[0], points, order);
    for (l, layer) in layers.iter().enumerate() {
        affine_into(&layer.weights, layer.bias.view(), &rec.inputs[l], n, &mut rec.pre[l]);
        if l + 1 < depth {
            activate_into(
                params.activation(),
                &rec.pre[l],
                &mut rec.inputs[l + 1],
                &mut rec.derivs[l],
                n,
                order,
            );
        }
    }
}

/// Network output for a batch of points with the requested derivatives.
pub fn forward_batch(params: &NetworkParams, points: &[[f64; 3]], order: JetOrder) -> JetBatch {
    let mut rec = PassRecord::default();
    propagate_into(params, points, order, &mut rec);
    JetBatch::from_row(rec.output().row(0), points.len(), order)
}

/// Network value `φ(x; θ)`.
pub fn forward(params: &NetworkParams, x: [f64; 3]) -> f64 {
    forward_batch(params, &[x], JetOrder::Value).value(0)
}

/// Network value, gradient and pure second derivatives at `x`.
pub fn forward_jet(params: &NetworkParams, x: [f64; 3]) -> JetTriple {
    forward_batch(params, &[x], JetOrder::Full).triple(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{init_params, Dense, NetworkSpec};
    use ndarray::{arr1, arr2, Array1};

    fn affine_net(w: [f64; 3], b: f64) -> NetworkParams {
        let layer = Dense {
            weights: arr2(&[w]),
            bias: arr1(&[b]),
        };
        NetworkParams::from_layers(vec![layer], ActivationKind::Tanh).unwrap()
    }

    #[test]
    fn zero_network_is_zero() {
        let mut p = init_params(&NetworkSpec::scalar_field(vec![8, 8], ActivationKind::Tanh, 1)).unwrap();
        let zeros = vec![0.0; p.n_params()];
        p.set_flat(&zeros).unwrap();
        for x in [[0.1, 0.2, 0.3], [1.0, -4.0, 9.0]] {
            assert_eq!(forward(&p, x), 0.0);
        }
    }

    #[test]
    fn single_linear_layer_sums_inputs() {
        let p = affine_net([1.0, 1.0, 1.0], 0.0);
        assert_eq!(forward(&p, [0.25, 0.5, 2.0]), 2.75);
    }

    #[test]
    fn affine_field_has_exact_jet() {
        let p = affine_net([2.0, 0.0, 0.0], 3.0);
        let j = forward_jet(&p, [0.7, 0.1, 0.4]);
        assert_eq!(j.value, 4.4);
        assert_eq!(j.grad, [2.0, 0.0, 0.0]);
        assert_eq!(j.lap_diag, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn tanh_of_first_coordinate() {
        // hidden unit a = x1, output = y
        let hidden = Dense {
            weights: arr2(&[[1.0, 0.0, 0.0]]),
            bias: Array1::zeros(1),
        };
        let out = Dense {
            weights: arr2(&[[1.0]]),
            bias: Array1::zeros(1),
        };
        let p = NetworkParams::from_layers(vec![hidden, out], ActivationKind::Tanh).unwrap();
        for x1 in [-1.3, 0.0, 0.4, 2.2] {
            let j = forward_jet(&p, [x1, 0.3, 0.8]);
            let t = x1.tanh();
            assert!((j.value - t).abs() < 1e-15);
            assert!((j.grad[0] - (1.0 - t * t)).abs() < 1e-15);
            assert!((j.lap_diag[0] + 2.0 * t * (1.0 - t * t)).abs() < 1e-15);
            assert_eq!(j.lap_diag[1], 0.0);
        }
    }

    #[test]
    fn forward_agrees_with_jet_value() {
        let p = init_params(&NetworkSpec::scalar_field(vec![12, 7], ActivationKind::Mish, 5)).unwrap();
        let pts = [[0.1, 0.9, 0.4], [0.5, 0.5, 0.5], [0.0, 1.0, 0.3]];
        for x in pts {
            let v = forward(&p, x);
            let j = forward_jet(&p, x);
            assert!((v - j.value).abs() <= 1e-14 * v.abs().max(1.0));
        }
    }

    #[test]
    fn batch_matches_pointwise() {
        let p = init_params(&NetworkSpec::scalar_field(vec![6, 5], ActivationKind::Arctan, 2)).unwrap();
        let pts: Vec<[f64; 3]> = (0..9).map(|i| [i as f64 * 0.1, 0.3, 1.0 - i as f64 * 0.05]).collect();
        let batch = forward_batch(&p, &pts, JetOrder::Full);
        for (j, x) in pts.iter().enumerate() {
            let single = forward_jet(&p, *x);
            let b = batch.triple(j);
            assert!((b.value - single.value).abs() < 1e-14);
            for k in 0..3 {
                assert!((b.grad[k] - single.grad[k]).abs() < 1e-13);
                assert!((b.lap_diag[k] - single.lap_diag[k]).abs() < 1e-13);
            }
        }
    }
}
