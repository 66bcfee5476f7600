use serde::{Deserialize, Serialize};

use crate::net::JetTriple;
use crate::physics::ScalarField;

const POLY3D_DENOMINATOR: [f64; 8] = [5.0, 0.2, 0.4, 0.6, 0.1, 0.2, 0.3, 0.7];

/// Closed-form potentials of the benchmark cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AnalyticSolution {
    /// `300 z / (1 + 2z)` for `k = 5 (1 + 2z)^2`.
    Parabolic,
    /// `100 (1 - e^{-2z}) / (1 - e^{-2})` for `k = 5 e^{2z}`.
    Exponential,
    /// `100 (cot 1 + 2) sin z / (cos z + 2 sin z)` for `k = 5 (cos z + 2 sin z)^2`.
    Trigonometric,
    /// `xyz / g` for `k = g^2` with `g` the trilinear form
    /// `5 + 0.2x + 0.4y + 0.6z + 0.1xy + 0.2yz + 0.3zx + 0.7xyz`.
    Poly3D,
    /// `inner + (outer - inner) ln(r / r_inner) / ln(r_outer / r_inner)`.
    RadialLog {
        r_inner: f64,
        r_outer: f64,
        inner: f64,
        outer: f64,
    },
}

/// Field depending on `z` only.
fn z_only(value: f64, dz: f64, dzz: f64) -> JetTriple {
    JetTriple {
        value,
        grad: [0.0, 0.0, dz],
        lap_diag: [0.0, 0.0, dzz],
    }
}

impl AnalyticSolution {
    pub fn eval(&self, x: [f64; 3]) -> JetTriple {
        match *self {
            AnalyticSolution::Parabolic => {
                let z = x[2];
                let d = 1.0 + 2.0 * z;
                z_only(300.0 * z / d, 300.0 / (d * d), -1200.0 / (d * d * d))
            }
            AnalyticSolution::Exponential => {
                let z = x[2];
                let denom = 1.0 - (-2.0f64).exp();
                let e = (-2.0 * z).exp();
                z_only(100.0 * (1.0 - e) / denom, 200.0 * e / denom, -400.0 * e / denom)
            }
            AnalyticSolution::Trigonometric => {
                let z = x[2];
                let amp = 100.0 * (1.0f64.cos() / 1.0f64.sin() + 2.0);
                let (s, c) = z.sin_cos();
                let w = c + 2.0 * s;
                let dw = 2.0 * c - s;
                // d/dz (sin z / w) = 1 / w^2 because sin^2 + cos^2 = 1
                z_only(amp * s / w, amp / (w * w), -2.0 * amp * dw / (w * w * w))
            }
            AnalyticSolution::Poly3D => {
                let c = POLY3D_DENOMINATOR;
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
                let h = x * y * z;
                let dh = [y * z, x * z, x * y];
                let phi = h / g;
                // h and g are linear in each coordinate, so h_ii = g_ii = 0 and
                // phi_ii = -2 g_i phi_i / g
                let grad: [f64; 3] = std::array::from_fn(|i| (dh[i] - phi * dg[i]) / g);
                let lap_diag: [f64; 3] = std::array::from_fn(|i| -2.0 * dg[i] * grad[i] / g);
                JetTriple {
                    value: phi,
                    grad,
                    lap_diag,
                }
            }
            AnalyticSolution::RadialLog {
                r_inner,
                r_outer,
                inner,
                outer,
            } => {
                let [x, y, _] = x;
                let r2 = x * x + y * y;
                let a = (outer - inner) / (r_outer / r_inner).ln();
                let r4 = r2 * r2;
                JetTriple {
                    value: inner + a * (0.5 * (r2 / (r_inner * r_inner)).ln()),
                    grad: [a * x / r2, a * y / r2, 0.0],
                    lap_diag: [a * (y * y - x * x) / r4, a * (x * x - y * y) / r4, 0.0],
                }
            }
        }
    }
}

impl ScalarField for AnalyticSolution {
    fn jet(&self, x: [f64; 3]) -> JetTriple {
        self.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(sol: AnalyticSolution, p: [f64; 3]) {
        let h = 1e-5;
        let j = sol.eval(p);
        for k in 0..3 {
            let mut pp = p;
            pp[k] += h;
            let mut pm = p;
            pm[k] -= h;
            let (fp, fm) = (sol.eval(pp).value, sol.eval(pm).value);
            let d1 = (fp - fm) / (2.0 * h);
            let d2 = (fp - 2.0 * j.value + fm) / (h * h);
            let scale = j.value.abs().max(1.0);
            assert!(
                (d1 - j.grad[k]).abs() <= 1e-7 * scale,
                "{sol:?} grad {k}: {d1} vs {}",
                j.grad[k]
            );
            assert!(
                (d2 - j.lap_diag[k]).abs() <= 1e-3 * scale,
                "{sol:?} lap {k}: {d2} vs {}",
                j.lap_diag[k]
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let radial = AnalyticSolution::RadialLog {
            r_inner: 0.3,
            r_outer: 0.5,
            inner: 0.0,
            outer: 100.0,
        };
        for p in [[0.2, 0.4, 0.3], [0.7, 0.1, 0.9], [0.5, 0.5, 0.5]] {
            for sol in [
                AnalyticSolution::Parabolic,
                AnalyticSolution::Exponential,
                AnalyticSolution::Trigonometric,
                AnalyticSolution::Poly3D,
            ] {
                fd_check(sol, p);
            }
        }
        for p in [[0.35, 0.1, 0.05], [-0.2, 0.3, 0.02], [0.0, -0.45, 0.09]] {
            fd_check(radial, p);
        }
    }

    #[test]
    fn boundary_values() {
        assert!((AnalyticSolution::Parabolic.eval([0.1, 0.2, 1.0]).value - 100.0).abs() < 1e-12);
        assert_eq!(AnalyticSolution::Parabolic.eval([0.1, 0.2, 0.5]).value, 75.0);
        assert_eq!(AnalyticSolution::Exponential.eval([0.4, 0.4, 0.0]).value, 0.0);
        assert!((AnalyticSolution::Exponential.eval([0.4, 0.4, 1.0]).value - 100.0).abs() < 1e-12);
        assert!((AnalyticSolution::Trigonometric.eval([0.4, 0.4, 1.0]).value - 100.0).abs() < 1e-12);
        assert_eq!(AnalyticSolution::Trigonometric.eval([0.4, 0.4, 0.0]).value, 0.0);
        let radial = AnalyticSolution::RadialLog {
            r_inner: 0.3,
            r_outer: 0.5,
            inner: 0.0,
            outer: 100.0,
        };
        assert!((radial.eval([0.5, 0.0, 0.05]).value - 100.0).abs() < 1e-12);
        assert!(radial.eval([0.0, 0.3, 0.05]).value.abs() < 1e-12);
    }
}
