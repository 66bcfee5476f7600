use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ActivationKind, NetError};

/// Architecture of a dense feedforward network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub output_dim: usize,
    pub activation: ActivationKind,
    pub seed: u64,
}

impl NetworkSpec {
    /// Three inputs, one linear output.
    pub fn scalar_field(hidden_widths: Vec<usize>, activation: ActivationKind, seed: u64) -> Self {
        NetworkSpec {
            input_dim: 3,
            hidden_widths,
            output_dim: 1,
            activation,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), NetError> {
        if self.hidden_widths.is_empty() {
            return Err(NetError::InvalidSpec("hidden_widths must not be empty".into()));
        }
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_widths.contains(&0) {
            return Err(NetError::InvalidSpec("layer widths must be positive".into()));
        }
        Ok(())
    }

    fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_widths.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden_widths);
        w.push(self.output_dim);
        w
    }
}

/// One affine map `a = W y + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `rows = fan_out`, `cols = fan_in`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Dense {
    pub fn fan_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.nrows()
    }
}

/// Weights and biases of every layer plus the shared hidden activation.
///
/// The last layer is linear; every other layer is followed by `activation`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    layers: Vec<Dense>,
    activation: ActivationKind,
}

/// Glorot-uniform weights, zero biases, reproducible from `spec.seed`.
pub fn init_params(spec: &NetworkSpec) -> Result<NetworkParams, NetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let widths = spec.widths();
    let layers = widths
        .windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = Array2::from_shape_simple_fn((fan_out, fan_in), || rng.random_range(-limit..limit));
            Dense {
                weights,
                bias: Array1::zeros(fan_out),
            }
        })
        .collect();
    NetworkParams::from_layers(layers, spec.activation)
}

impl NetworkParams {
    /// Builds a network from explicit layers. Unlike [`init_params`] this
    /// accepts a single (purely affine) layer.
    pub fn from_layers(layers: Vec<Dense>, activation: ActivationKind) -> Result<Self, NetError> {
        if layers.is_empty() {
            return Err(NetError::Shape("network needs at least one layer".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.fan_out() {
                return Err(NetError::Shape(format!(
                    "layer {i}: bias length {} != weight rows {}",
                    layer.bias.len(),
                    layer.fan_out()
                )));
            }
            if layer.fan_in() == 0 || layer.fan_out() == 0 {
                return Err(NetError::Shape(format!("layer {i}: zero width")));
            }
            if i > 0 && layers[i - 1].fan_out() != layer.fan_in() {
                return Err(NetError::Shape(format!(
                    "layer {i}: expects {} inputs but previous layer has {} outputs",
                    layer.fan_in(),
                    layers[i - 1].fan_out()
                )));
            }
            if layer.weights.iter().chain(layer.bias.iter()).any(|v| !v.is_finite()) {
                return Err(NetError::Shape(format!("layer {i}: non-finite parameter")));
            }
        }
        Ok(NetworkParams { layers, activation })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].fan_out()
    }

    pub fn n_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// Flattened parameters: for each layer, `W` row-major then `b`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for layer in &self.layers {
            out.extend(layer.weights.iter());
            out.extend(layer.bias.iter());
        }
        out
    }

    pub fn set_flat(&mut self, theta: &[f64]) -> Result<(), NetError> {
        if theta.len() != self.n_params() {
            return Err(NetError::Shape(format!(
                "flat vector has {} entries, network has {}",
                theta.len(),
                self.n_params()
            )));
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            for (dst, src) in layer.weights.iter_mut().zip(&theta[offset..]) {
                *dst = *src;
            }
            offset += layer.weights.len();
            for (dst, src) in layer.bias.iter_mut().zip(&theta[offset..]) {
                *dst = *src;
            }
            offset += layer.bias.len();
        }
        Ok(())
    }

    pub fn with_flat(&self, theta: &[f64]) -> Result<Self, NetError> {
        let mut out = self.clone();
        out.set_flat(theta)?;
        Ok(out)
    }

    /// Plain-text snapshot: a header line, then per layer its shape line
    /// followed by row-major weights and the bias, one value per line.
    pub fn to_snapshot(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "dcm-params v1 activation={} layers={}\n",
            activation_tag(self.activation),
            self.layers.len()
        ));
        for layer in &self.layers {
            s.push_str(&format!("layer {} {}\n", layer.fan_out(), layer.fan_in()));
            for v in layer.weights.iter().chain(layer.bias.iter()) {
                s.push_str(&format!("{v:.16e}\n"));
            }
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self, NetError> {
        let bad = |msg: &str| NetError::Snapshot(msg.to_string());
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty snapshot"))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("dcm-params") || parts.next() != Some("v1") {
            return Err(bad("missing `dcm-params v1` header"));
        }
        let mut activation = None;
        let mut n_layers = None;
        for kv in parts {
            match kv.split_once('=') {
                Some(("activation", v)) => activation = Some(parse_activation_tag(v)?),
                Some(("layers", v)) => n_layers = Some(v.parse::<usize>().map_err(|_| bad("bad layer count"))?),
                _ => return Err(bad(&format!("unexpected header field `{kv}`"))),
            }
        }
        let activation = activation.ok_or_else(|| bad("header lacks activation"))?;
        let n_layers = n_layers.ok_or_else(|| bad("header lacks layer count"))?;
        let mut layers = Vec::with_capacity(n_layers);
        for _ in 0..n_layers {
            let shape = lines.next().ok_or_else(|| bad("truncated snapshot"))?;
            let dims: Vec<&str> = shape.split_whitespace().collect();
            let (rows, cols) = match dims.as_slice() {
                ["layer", r, c] => (
                    r.parse::<usize>().map_err(|_| bad("bad row count"))?,
                    c.parse::<usize>().map_err(|_| bad("bad column count"))?,
                ),
                _ => return Err(bad(&format!("expected layer shape, got `{shape}`"))),
            };
            let mut values = Vec::with_capacity(rows * cols + rows);
            for _ in 0..rows * cols + rows {
                let line = lines.next().ok_or_else(|| bad("truncated snapshot"))?;
                values.push(
                    line.trim()
                        .parse::<f64>()
                        .map_err(|_| bad(&format!("bad number `{line}`")))?,
                );
            }
            let bias = Array1::from(values.split_off(rows * cols));
            let weights = Array2::from_shape_vec((rows, cols), values).map_err(|e| bad(&e.to_string()))?;
            layers.push(Dense { weights, bias });
        }
        if lines.next().is_some() {
            return Err(bad("trailing data after last layer"));
        }
        NetworkParams::from_layers(layers, activation)
    }
}

fn activation_tag(kind: ActivationKind) -> String {
    match kind {
        ActivationKind::Swish { beta } => format!("swish:{beta:.16e}"),
        other => other.name().to_string(),
    }
}

fn parse_activation_tag(tag: &str) -> Result<ActivationKind, NetError> {
    match tag.split_once(':') {
        Some(("swish", beta)) => {
            let beta = beta
                .parse::<f64>()
                .map_err(|_| NetError::Snapshot(format!("bad swish beta `{beta}`")))?;
            ActivationKind::swish(beta)
        }
        _ => tag.parse(),
    }
}
