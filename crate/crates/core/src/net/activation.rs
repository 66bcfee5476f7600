use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NetError;

const LECUN_SCALE: f64 = 1.7159;
const LECUN_SLOPE: f64 = 2.0 / 3.0;

/// Smooth hidden-layer nonlinearity.
///
/// Every kind supplies closed-form first, second and third derivatives. The
/// third derivative is needed when a second-order jet is differentiated with
/// respect to the network parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ActivationKind {
    Tanh,
    Sigmoid,
    Swish { beta: f64 },
    LeCunTanh,
    BipolarSigmoid,
    Mish,
    Arctan,
    Silu,
}

/// Value and derivatives of an activation at one point, lowest order first.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActivationDerivs {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl ActivationKind {
    /// The eight kinds in table order, with `Swish` at its default `beta = 1`.
    pub const ALL: [ActivationKind; 8] = [
        ActivationKind::Tanh,
        ActivationKind::Sigmoid,
        ActivationKind::Swish { beta: 1.0 },
        ActivationKind::LeCunTanh,
        ActivationKind::BipolarSigmoid,
        ActivationKind::Mish,
        ActivationKind::Arctan,
        ActivationKind::Silu,
    ];

    pub fn swish(beta: f64) -> Result<Self, NetError> {
        if beta.is_finite() && beta > 0.0 {
            Ok(ActivationKind::Swish { beta })
        } else {
            Err(NetError::InvalidSpec(format!(
                "swish beta must be positive, got {beta}"
            )))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Swish { .. } => "swish",
            ActivationKind::LeCunTanh => "lecun_tanh",
            ActivationKind::BipolarSigmoid => "bipolar_sigmoid",
            ActivationKind::Mish => "mish",
            ActivationKind::Arctan => "arctan",
            ActivationKind::Silu => "silu",
        }
    }

    #[inline]
    pub fn derivs(&self, x: f64) -> ActivationDerivs {
        match *self {
            ActivationKind::Tanh => tanh_derivs(x),
            ActivationKind::Sigmoid => sigmoid_derivs(x),
            ActivationKind::Swish { beta } => swish_derivs(x, beta),
            ActivationKind::LeCunTanh => scaled(tanh_derivs(LECUN_SLOPE * x), LECUN_SCALE, LECUN_SLOPE),
            // (e^x - 1) / (e^x + 1) == tanh(x / 2)
            ActivationKind::BipolarSigmoid => scaled(tanh_derivs(0.5 * x), 1.0, 0.5),
            ActivationKind::Mish => mish_derivs(x),
            ActivationKind::Arctan => arctan_derivs(x),
            ActivationKind::Silu => swish_derivs(x, 1.0),
        }
    }
}

/// Returns `(σ(x), σ'(x), σ''(x))`.
pub fn activation_eval(kind: ActivationKind, x: f64) -> (f64, f64, f64) {
    let d = kind.derivs(x);
    (d.value, d.d1, d.d2)
}

/// Derivatives of `amp * f(slope * x)` given those of `f` at `slope * x`.
#[inline]
fn scaled(inner: ActivationDerivs, amp: f64, slope: f64) -> ActivationDerivs {
    ActivationDerivs {
        value: amp * inner.value,
        d1: amp * slope * inner.d1,
        d2: amp * slope * slope * inner.d2,
        d3: amp * slope * slope * slope * inner.d3,
    }
}

#[inline]
fn tanh_derivs(x: f64) -> ActivationDerivs {
    let t = x.tanh();
    let sech2 = 1.0 - t * t;
    ActivationDerivs {
        value: t,
        d1: sech2,
        d2: -2.0 * t * sech2,
        d3: sech2 * (6.0 * t * t - 2.0),
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn sigmoid_derivs(x: f64) -> ActivationDerivs {
    let s = logistic(x);
    let ds = s * (1.0 - s);
    ActivationDerivs {
        value: s,
        d1: ds,
        d2: ds * (1.0 - 2.0 * s),
        d3: ds * (1.0 - 6.0 * s + 6.0 * s * s),
    }
}

/// `x * g(beta x)` with `g` the logistic function.
#[inline]
fn swish_derivs(x: f64, beta: f64) -> ActivationDerivs {
    let g = sigmoid_derivs(beta * x);
    let (b, b2, b3) = (beta, beta * beta, beta * beta * beta);
    ActivationDerivs {
        value: x * g.value,
        d1: g.value + x * b * g.d1,
        d2: 2.0 * b * g.d1 + x * b2 * g.d2,
        d3: 3.0 * b2 * g.d2 + x * b3 * g.d3,
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `x * tanh(softplus(x))`.
#[inline]
fn mish_derivs(x: f64) -> ActivationDerivs {
    let sp = softplus(x);
    let t = tanh_derivs(sp);
    // derivatives of softplus are the logistic function and its derivatives
    let s = sigmoid_derivs(x);
    let (s1, s2, s3) = (s.value, s.d1, s.d2);
    // g = tanh(softplus(x)) by Faa di Bruno
    let g0 = t.value;
    let g1 = t.d1 * s1;
    let g2 = t.d2 * s1 * s1 + t.d1 * s2;
    let g3 = t.d3 * s1 * s1 * s1 + 3.0 * t.d2 * s1 * s2 + t.d1 * s3;
    ActivationDerivs {
        value: x * g0,
        d1: g0 + x * g1,
        d2: 2.0 * g1 + x * g2,
        d3: 3.0 * g2 + x * g3,
    }
}

#[inline]
fn arctan_derivs(x: f64) -> ActivationDerivs {
    let q = 1.0 / (1.0 + x * x);
    ActivationDerivs {
        value: x.atan(),
        d1: q,
        d2: -2.0 * x * q * q,
        d3: (6.0 * x * x - 2.0) * q * q * q,
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActivationKind::Swish { beta } if *beta != 1.0 => write!(f, "swish({beta})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for ActivationKind {
    type Err = NetError;

    /// Case-insensitive; `-`, `_` and spaces are ignored, so `LeCun-Tanh`
    /// and `lecun_tanh` are the same kind.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        let kind = match key.as_str() {
            "tanh" => ActivationKind::Tanh,
            "sigmoid" => ActivationKind::Sigmoid,
            "swish" => ActivationKind::Swish { beta: 1.0 },
            "lecuntanh" | "lecunstanh" => ActivationKind::LeCunTanh,
            "bipolarsigmoid" => ActivationKind::BipolarSigmoid,
            "mish" => ActivationKind::Mish,
            "arctan" | "atan" => ActivationKind::Arctan,
            "silu" => ActivationKind::Silu,
            _ => return Err(NetError::UnknownActivation(s.to_string())),
        };
        Ok(kind)
    }
}
