//! Benchmark cases with closed-form solutions, error metrics and field
//! evaluation on regular grids.

mod analytic;
mod evaluate;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use analytic::AnalyticSolution;
pub use evaluate::{evaluate_case, flux_profile, CaseEvaluation, EvalGrid, FieldRow, ProfileLine, ProfileRow};
pub use metrics::ErrorMetric;

use crate::net::JetTriple;
use crate::physics::{Axis, MaterialModel, PhysicsError};
use crate::sampling::Geometry;

/// The benchmark problems: a unit cube graded along z with three laws, a
/// cube with full 3D grading, and a hollow cylinder graded along its axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    Case1Parabolic,
    Case1Exponential,
    Case1Trigonometric,
    Case2Poly3D,
    Case3Cylinder,
}

pub const CYLINDER_R_INNER: f64 = 0.3;
pub const CYLINDER_R_OUTER: f64 = 0.5;
pub const CYLINDER_HEIGHT: f64 = 0.1;

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        CaseId::Case1Parabolic,
        CaseId::Case1Exponential,
        CaseId::Case1Trigonometric,
        CaseId::Case2Poly3D,
        CaseId::Case3Cylinder,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseId::Case1Parabolic => "case1_parabolic",
            CaseId::Case1Exponential => "case1_exponential",
            CaseId::Case1Trigonometric => "case1_trigonometric",
            CaseId::Case2Poly3D => "case2_poly3d",
            CaseId::Case3Cylinder => "case3_cylinder",
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            CaseId::Case3Cylinder => Geometry::AnnularCylinder {
                r_inner: CYLINDER_R_INNER,
                r_outer: CYLINDER_R_OUTER,
                height: CYLINDER_HEIGHT,
            },
            _ => Geometry::UnitCube,
        }
    }

    pub fn material(&self) -> MaterialModel {
        match self {
            CaseId::Case1Parabolic => MaterialModel::Parabolic {
                k0: 5.0,
                a1: 1.0,
                a2: 2.0,
                axis: Axis::Z,
            },
            // (e^{beta z})^2 with beta = 1 is e^{2z}
            CaseId::Case1Exponential => MaterialModel::Exponential {
                k0: 5.0,
                a1: 1.0,
                a2: 0.0,
                beta: 1.0,
                axis: Axis::Z,
            },
            CaseId::Case1Trigonometric => MaterialModel::Trigonometric {
                k0: 5.0,
                a1: 1.0,
                a2: 2.0,
                beta: 1.0,
                axis: Axis::Z,
            },
            CaseId::Case2Poly3D => MaterialModel::Poly3D {
                c: [5.0, 0.2, 0.4, 0.6, 0.1, 0.2, 0.3, 0.7],
            },
            // 5 e^{3z}
            CaseId::Case3Cylinder => MaterialModel::Exponential {
                k0: 5.0,
                a1: 1.0,
                a2: 0.0,
                beta: 1.5,
                axis: Axis::Z,
            },
        }
    }

    pub fn solution(&self) -> AnalyticSolution {
        match self {
            CaseId::Case1Parabolic => AnalyticSolution::Parabolic,
            CaseId::Case1Exponential => AnalyticSolution::Exponential,
            CaseId::Case1Trigonometric => AnalyticSolution::Trigonometric,
            CaseId::Case2Poly3D => AnalyticSolution::Poly3D,
            CaseId::Case3Cylinder => AnalyticSolution::RadialLog {
                r_inner: CYLINDER_R_INNER,
                r_outer: CYLINDER_R_OUTER,
                inner: 0.0,
                outer: 100.0,
            },
        }
    }

    /// Normal used when reporting flux inside the domain: `+z` for the
    /// cubes, radially outward for the cylinder.
    pub fn canonical_normal(&self, x: [f64; 3]) -> [f64; 3] {
        match self {
            CaseId::Case3Cylinder => {
                let r = x[0].hypot(x[1]);
                [x[0] / r, x[1] / r, 0.0]
            }
            _ => [0.0, 0.0, 1.0],
        }
    }

    /// Line along which the case's profile is usually plotted.
    pub fn default_profile(&self) -> ProfileLine {
        match self {
            CaseId::Case2Poly3D => ProfileLine {
                start: [0.0; 3],
                end: [1.0; 3],
            },
            CaseId::Case3Cylinder => ProfileLine {
                start: [CYLINDER_R_INNER, 0.0, CYLINDER_HEIGHT],
                end: [CYLINDER_R_OUTER, 0.0, CYLINDER_HEIGHT],
            },
            _ => ProfileLine {
                start: [0.5, 0.5, 0.0],
                end: [0.5, 0.5, 1.0],
            },
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        CaseId::ALL
            .into_iter()
            .find(|c| c.name() == key)
            .ok_or_else(|| BenchError::UnknownCase(s.to_string()))
    }
}

pub const DOMAIN_TOL: f64 = 1e-9;

/// Closed-form value and derivatives of a case's solution at `x`.
pub fn analytic_phi(case: CaseId, x: [f64; 3]) -> Result<JetTriple, BenchError> {
    if !case.geometry().contains(x, DOMAIN_TOL) {
        return Err(BenchError::OutOfDomain {
            case: case.name(),
            point: x,
        });
    }
    Ok(case.solution().eval(x))
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("point {point:?} is outside the domain of {case}")]
    OutOfDomain { case: &'static str, point: [f64; 3] },
    #[error("evaluation grid needs at least 2 points per axis, got {0}")]
    GridTooCoarse(usize),
    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}
