use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{BenchError, CaseId, ErrorMetric, DOMAIN_TOL};
use crate::net::JetTriple;
use crate::physics::ScalarField;
use crate::sampling::Geometry;

/// Regular evaluation grid with nodes offset half a cell from the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalGrid {
    Cube { n: usize },
    Cylinder { n_r: usize, n_theta: usize, n_z: usize },
}

impl EvalGrid {
    /// Grid for a case from a single resolution. Cubes get `n` nodes per
    /// axis; the cylinder gets `n` radial nodes and keeps the default
    /// `21 x 48 x 5` aspect in angle and height.
    pub fn for_case(case: CaseId, n: usize) -> Result<Self, BenchError> {
        if n < 2 {
            return Err(BenchError::GridTooCoarse(n));
        }
        Ok(match case.geometry() {
            Geometry::UnitCube => EvalGrid::Cube { n },
            Geometry::AnnularCylinder { .. } => EvalGrid::Cylinder {
                n_r: n,
                n_theta: ((48 * n) as f64 / 21.0).round().max(2.0) as usize,
                n_z: ((5 * n) as f64 / 21.0).round().max(2.0) as usize,
            },
        })
    }

    /// Node counts along the three grid axes, fastest first.
    pub fn dims(&self) -> [usize; 3] {
        match *self {
            EvalGrid::Cube { n } => [n, n, n],
            EvalGrid::Cylinder { n_r, n_theta, n_z } => [n_r, n_theta, n_z],
        }
    }

    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid nodes in `(i, j, k)` order with `i` varying fastest.
    pub fn points(&self, geometry: Geometry) -> Result<Vec<[f64; 3]>, BenchError> {
        let dims = self.dims();
        if let Some(&bad) = dims.iter().find(|&&d| d < 2) {
            return Err(BenchError::GridTooCoarse(bad));
        }
        let cell = |i: usize, n: usize| (i as f64 + 0.5) / n as f64;
        let mut pts = Vec::with_capacity(self.len());
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let (u, v, w) = (cell(i, dims[0]), cell(j, dims[1]), cell(k, dims[2]));
                    let p = match (self, geometry) {
                        (EvalGrid::Cube { .. }, Geometry::UnitCube) => [u, v, w],
                        (
                            EvalGrid::Cylinder { .. },
                            Geometry::AnnularCylinder {
                                r_inner,
                                r_outer,
                                height,
                            },
                        ) => {
                            let r = r_inner + u * (r_outer - r_inner);
                            let theta = 2.0 * PI * v;
                            [r * theta.cos(), r * theta.sin(), w * height]
                        }
                        _ => {
                            return Err(BenchError::OutOfDomain {
                                case: "grid/geometry mismatch",
                                point: [u, v, w],
                            })
                        }
                    };
                    pts.push(p);
                }
            }
        }
        Ok(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub point: [f64; 3],
    pub phi_pred: f64,
    pub phi_exact: f64,
    pub q_pred: f64,
    pub q_exact: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseEvaluation {
    pub case: CaseId,
    pub grid: EvalGrid,
    pub rows: Vec<FieldRow>,
    pub metric: ErrorMetric,
}

fn flux_along(case: CaseId, p: [f64; 3], jet: &JetTriple) -> f64 {
    let (k, _) = case.material().eval(p);
    let n = case.canonical_normal(p);
    -k * (jet.grad[0] * n[0] + jet.grad[1] * n[1] + jet.grad[2] * n[2])
}

/// Compares `field` with the case's closed-form solution on `grid`.
pub fn evaluate_case(case: CaseId, field: &dyn ScalarField, grid: EvalGrid) -> Result<CaseEvaluation, BenchError> {
    let points = grid.points(case.geometry())?;
    let exact = case.solution();
    let pred = field.jets(&points);
    let rows: Vec<FieldRow> = points
        .iter()
        .zip(&pred)
        .map(|(&p, jp)| {
            let je = exact.eval(p);
            FieldRow {
                point: p,
                phi_pred: jp.value,
                phi_exact: je.value,
                q_pred: flux_along(case, p, jp),
                q_exact: flux_along(case, p, &je),
                abs_err: (jp.value - je.value).abs(),
            }
        })
        .collect();
    let phi_pred: Vec<f64> = rows.iter().map(|r| r.phi_pred).collect();
    let phi_exact: Vec<f64> = rows.iter().map(|r| r.phi_exact).collect();
    Ok(CaseEvaluation {
        case,
        grid,
        metric: ErrorMetric::compute(&phi_pred, &phi_exact),
        rows,
    })
}

/// Straight segment through the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileLine {
    pub start: [f64; 3],
    pub end: [f64; 3],
}

impl ProfileLine {
    pub fn at(&self, s: f64) -> [f64; 3] {
        std::array::from_fn(|k| self.start[k] + s * (self.end[k] - self.start[k]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Arc-length fraction along the line, `0` at the start and `1` at the end.
    pub s: f64,
    pub point: [f64; 3],
    pub phi_pred: f64,
    pub phi_exact: f64,
    pub q_pred: f64,
    pub q_exact: f64,
}

/// Potential and flux (with the case's canonical normal) sampled at
/// `n_samples` evenly spaced points along `line`, endpoints included.
pub fn flux_profile(
    case: CaseId,
    field: &dyn ScalarField,
    line: ProfileLine,
    n_samples: usize,
) -> Result<Vec<ProfileRow>, BenchError> {
    if n_samples < 2 {
        return Err(BenchError::GridTooCoarse(n_samples));
    }
    let geometry = case.geometry();
    let params: Vec<f64> = (0..n_samples).map(|i| i as f64 / (n_samples - 1) as f64).collect();
    let points: Vec<[f64; 3]> = params.iter().map(|&s| line.at(s)).collect();
    if let Some(&p) = points.iter().find(|&&p| !geometry.contains(p, DOMAIN_TOL)) {
        return Err(BenchError::OutOfDomain {
            case: case.name(),
            point: p,
        });
    }
    let exact = case.solution();
    let pred = field.jets(&points);
    Ok(params
        .iter()
        .zip(&points)
        .zip(&pred)
        .map(|((&s, &p), jp)| {
            let je = exact.eval(p);
            ProfileRow {
                s,
                point: p,
                phi_pred: jp.value,
                phi_exact: je.value,
                q_pred: flux_along(case, p, jp),
                q_exact: flux_along(case, p, &je),
            }
        })
        .collect())
}
