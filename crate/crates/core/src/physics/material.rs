use serde::{Deserialize, Serialize};

use super::PhysicsError;
use crate::sampling::Geometry;

/// Coordinate along which a one-dimensional grading varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Position-dependent conductivity `k(x)`.
///
/// The axis laws are `k0 * g(t)^2` with `t` the coordinate along `axis` and
/// - parabolic: `g = a1 + a2 t`
/// - exponential: `g = a1 exp(beta t) + a2 exp(-beta t)`
/// - trigonometric: `g = a1 cos(beta t) + a2 sin(beta t)`
///
/// `Poly3D` is the square of a trilinear form,
/// `(c0 + c1 x + c2 y + c3 z + c4 xy + c5 yz + c6 zx + c7 xyz)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaterialModel {
    Parabolic {
        k0: f64,
        a1: f64,
        a2: f64,
        axis: Axis,
    },
    Exponential {
        k0: f64,
        a1: f64,
        a2: f64,
        beta: f64,
        axis: Axis,
    },
    Trigonometric {
        k0: f64,
        a1: f64,
        a2: f64,
        beta: f64,
        axis: Axis,
    },
    Poly3D {
        c: [f64; 8],
    },
}

/// Conductivity and its gradient at a point.
pub fn conductivity(model: &MaterialModel, x: [f64; 3]) -> (f64, [f64; 3]) {
    model.eval(x)
}

impl MaterialModel {
    #[inline]
    pub fn eval(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        match *self {
            MaterialModel::Parabolic { k0, a1, a2, axis } => {
                let t = x[axis.index()];
                along_axis(k0, a1 + a2 * t, a2, axis)
            }
            MaterialModel::Exponential { k0, a1, a2, beta, axis } => {
                let t = x[axis.index()];
                let (ep, em) = ((beta * t).exp(), (-beta * t).exp());
                along_axis(k0, a1 * ep + a2 * em, beta * (a1 * ep - a2 * em), axis)
            }
            MaterialModel::Trigonometric { k0, a1, a2, beta, axis } => {
                let (s, c) = (beta * x[axis.index()]).sin_cos();
                along_axis(k0, a1 * c + a2 * s, beta * (a2 * c - a1 * s), axis)
            }
            MaterialModel::Poly3D { c } => {
                let [x, y, z] = x;
                let g = c[0]
                    + c[1] * x
                    + c[2] * y
                    + c[3] * z
                    + c[4] * x * y
                    + c[5] * y * z
                    + c[6] * z * x
                    + c[7] * x * y * z;
                let dg = [
                    c[1] + c[4] * y + c[6] * z + c[7] * y * z,
                    c[2] + c[4] * x + c[5] * z + c[7] * x * z,
                    c[3] + c[5] * y + c[6] * x + c[7] * x * y,
                ];
                (g * g, [2.0 * g * dg[0], 2.0 * g * dg[1], 2.0 * g * dg[2]])
            }
        }
    }

    /// Same law with every conductivity value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            MaterialModel::Parabolic { k0, a1, a2, axis } => MaterialModel::Parabolic {
                k0: k0 * factor,
                a1,
                a2,
                axis,
            },
            MaterialModel::Exponential { k0, a1, a2, beta, axis } => MaterialModel::Exponential {
                k0: k0 * factor,
                a1,
                a2,
                beta,
                axis,
            },
            MaterialModel::Trigonometric { k0, a1, a2, beta, axis } => MaterialModel::Trigonometric {
                k0: k0 * factor,
                a1,
                a2,
                beta,
                axis,
            },
            MaterialModel::Poly3D { c } => {
                let s = factor.sqrt();
                MaterialModel::Poly3D { c: c.map(|v| v * s) }
            }
        }
    }

    /// Scans a 10x10x10 grid over `geometry` (node-inclusive) and rejects the
    /// model if `k` is not strictly positive and finite everywhere.
    pub fn check_positive_on(&self, geometry: &Geometry) -> Result<(), PhysicsError> {
        const N: usize = 10;
        for i in 0..N {
            for j in 0..N {
                for l in 0..N {
                    let u = [i, j, l].map(|v| v as f64 / (N - 1) as f64);
                    let p = match *geometry {
                        Geometry::UnitCube => u,
                        Geometry::AnnularCylinder {
                            r_inner,
                            r_outer,
                            height,
                        } => {
                            let r = r_inner + u[0] * (r_outer - r_inner);
                            let theta = 2.0 * std::f64::consts::PI * u[1];
                            [r * theta.cos(), r * theta.sin(), u[2] * height]
                        }
                    };
                    let (k, _) = self.eval(p);
                    if !(k.is_finite() && k > 0.0) {
                        return Err(PhysicsError::NonPositiveConductivity { point: p, k });
                    }
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn along_axis(k0: f64, g: f64, dg: f64, axis: Axis) -> (f64, [f64; 3]) {
    let mut grad = [0.0; 3];
    grad[axis.index()] = 2.0 * k0 * g * dg;
    (k0 * g * g, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_at_origin() {
        let m = MaterialModel::Parabolic {
            k0: 5.0,
            a1: 1.0,
            a2: 2.0,
            axis: Axis::Z,
        };
        assert_eq!(conductivity(&m, [0.3, 0.7, 0.0]), (5.0, [0.0, 0.0, 20.0]));
    }

    #[test]
    fn exponential_reproduces_5_exp_2z() {
        // f = (a1 e^{beta z})^2, so beta = 1 gives k = 5 e^{2z}
        let m = MaterialModel::Exponential {
            k0: 5.0,
            a1: 1.0,
            a2: 0.0,
            beta: 1.0,
            axis: Axis::Z,
        };
        assert_eq!(conductivity(&m, [0.0; 3]), (5.0, [0.0, 0.0, 10.0]));
        let (k, g) = conductivity(&m, [0.0, 0.0, 0.4]);
        assert!((k - 5.0 * 0.8f64.exp()).abs() < 1e-13);
        assert!((g[2] - 10.0 * 0.8f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn poly3d_at_origin() {
        let m = MaterialModel::Poly3D {
            c: [5.0, 0.2, 0.4, 0.6, 0.1, 0.2, 0.3, 0.7],
        };
        let (k, g) = conductivity(&m, [0.0; 3]);
        assert!((k - 25.0).abs() < 1e-14);
        for (gi, e) in g.iter().zip([2.0, 4.0, 6.0]) {
            assert!((gi - e).abs() < 1e-14);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let models = [
            MaterialModel::Parabolic {
                k0: 5.0,
                a1: 1.0,
                a2: 2.0,
                axis: Axis::Z,
            },
            MaterialModel::Parabolic {
                k0: 2.0,
                a1: 1.5,
                a2: -0.5,
                axis: Axis::X,
            },
            MaterialModel::Exponential {
                k0: 5.0,
                a1: 1.0,
                a2: 0.3,
                beta: 1.5,
                axis: Axis::Y,
            },
            MaterialModel::Trigonometric {
                k0: 5.0,
                a1: 1.0,
                a2: 2.0,
                beta: 1.0,
                axis: Axis::Z,
            },
            MaterialModel::Poly3D {
                c: [5.0, 0.2, 0.4, 0.6, 0.1, 0.2, 0.3, 0.7],
            },
        ];
        let h = 1e-6;
        for m in models {
            for p in [[0.1, 0.2, 0.3], [0.9, 0.5, 0.7], [0.33, 0.81, 0.05]] {
                let (_, g) = m.eval(p);
                for k in 0..3 {
                    let mut pp = p;
                    pp[k] += h;
                    let mut pm = p;
                    pm[k] -= h;
                    let fd = (m.eval(pp).0 - m.eval(pm).0) / (2.0 * h);
                    let err = (fd - g[k]).abs() / g[k].abs().max(1.0);
                    assert!(err <= 1e-8, "{m:?} axis {k}: {fd} vs {}", g[k]);
                }
            }
        }
    }

    #[test]
    fn positivity_scan() {
        let good = MaterialModel::Trigonometric {
            k0: 5.0,
            a1: 1.0,
            a2: 2.0,
            beta: 1.0,
            axis: Axis::Z,
        };
        assert!(good.check_positive_on(&Geometry::UnitCube).is_ok());
        // k = z^2 vanishes on the z = 0 nodes
        let bad = MaterialModel::Parabolic {
            k0: 1.0,
            a1: 0.0,
            a2: 1.0,
            axis: Axis::Z,
        };
        assert!(bad.check_positive_on(&Geometry::UnitCube).is_err());
        let negative = MaterialModel::Parabolic {
            k0: -1.0,
            a1: 1.0,
            a2: 0.0,
            axis: Axis::X,
        };
        assert!(negative.check_positive_on(&Geometry::UnitCube).is_err());
    }

    #[test]
    fn scaling_multiplies_conductivity() {
        let m = MaterialModel::Poly3D {
            c: [5.0, 0.2, 0.4, 0.6, 0.1, 0.2, 0.3, 0.7],
        };
        let s = m.scaled(4.0);
        let p = [0.2, 0.4, 0.9];
        assert!((s.eval(p).0 - 4.0 * m.eval(p).0).abs() < 1e-12);
    }
}
