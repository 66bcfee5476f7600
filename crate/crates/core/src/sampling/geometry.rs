use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{open_unit_points, SamplerKind, SamplingError};

/// Domains the solver can sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geometry {
    /// `[0, 1]^3`.
    UnitCube,
    /// Hollow cylinder around the z-axis with `0 <= z <= height`.
    AnnularCylinder { r_inner: f64, r_outer: f64, height: f64 },
}

/// A boundary portion with a single outward normal rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    XLo,
    XHi,
    YLo,
    YHi,
    ZLo,
    ZHi,
    InnerWall,
    OuterWall,
}

impl Face {
    pub fn name(&self) -> &'static str {
        match self {
            Face::XLo => "x_lo",
            Face::XHi => "x_hi",
            Face::YLo => "y_lo",
            Face::YHi => "y_hi",
            Face::ZLo => "z_lo",
            Face::ZHi => "z_hi",
            Face::InnerWall => "inner_wall",
            Face::OuterWall => "outer_wall",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub face: Face,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletPoint {
    pub point: [f64; 3],
    pub face: Face,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannPoint {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub face: Face,
    pub flux: f64,
}

/// Interior and boundary collocation points.
///
/// Freshly sampled sets keep their face points in `boundary`; attaching a
/// case's boundary conditions moves them into `dirichlet` and `neumann`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    pub geometry: Geometry,
    pub interior: Vec<[f64; 3]>,
    pub boundary: Vec<BoundaryPoint>,
    pub dirichlet: Vec<DirichletPoint>,
    pub neumann: Vec<NeumannPoint>,
}

impl Geometry {
    pub fn validate(&self) -> Result<(), SamplingError> {
        match *self {
            Geometry::UnitCube => Ok(()),
            Geometry::AnnularCylinder {
                r_inner,
                r_outer,
                height,
            } => {
                let all_positive = [r_inner, r_outer, height].iter().all(|v| v.is_finite() && *v > 0.0);
                if !all_positive {
                    return Err(SamplingError::Geometry("cylinder lengths must be positive".into()));
                }
                if r_inner >= r_outer {
                    return Err(SamplingError::Geometry(format!(
                        "inner radius {r_inner} must be below outer radius {r_outer}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn faces(&self) -> &'static [Face] {
        match self {
            Geometry::UnitCube => &[Face::XLo, Face::XHi, Face::YLo, Face::YHi, Face::ZLo, Face::ZHi],
            Geometry::AnnularCylinder { .. } => &[Face::InnerWall, Face::OuterWall, Face::ZLo, Face::ZHi],
        }
    }

    /// Point strictly inside the domain.
    pub fn contains_strict(&self, p: [f64; 3]) -> bool {
        match *self {
            Geometry::UnitCube => p.iter().all(|&c| c > 0.0 && c < 1.0),
            Geometry::AnnularCylinder {
                r_inner,
                r_outer,
                height,
            } => {
                let r = p[0].hypot(p[1]);
                r > r_inner && r < r_outer && p[2] > 0.0 && p[2] < height
            }
        }
    }

    /// Point in the closed domain, with slack `tol`.
    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        match *self {
            Geometry::UnitCube => p.iter().all(|&c| c >= -tol && c <= 1.0 + tol),
            Geometry::AnnularCylinder {
                r_inner,
                r_outer,
                height,
            } => {
                let r = p[0].hypot(p[1]);
                r >= r_inner - tol && r <= r_outer + tol && p[2] >= -tol && p[2] <= height + tol
            }
        }
    }

    /// Point lies on `face` (within `tol`) and inside the closed domain.
    pub fn on_face(&self, p: [f64; 3], face: Face, tol: f64) -> bool {
        if !self.contains(p, tol) {
            return false;
        }
        let near = |a: f64, b: f64| (a - b).abs() <= tol;
        match (*self, face) {
            (Geometry::UnitCube, Face::XLo) => near(p[0], 0.0),
            (Geometry::UnitCube, Face::XHi) => near(p[0], 1.0),
            (Geometry::UnitCube, Face::YLo) => near(p[1], 0.0),
            (Geometry::UnitCube, Face::YHi) => near(p[1], 1.0),
            (_, Face::ZLo) => near(p[2], 0.0),
            (Geometry::UnitCube, Face::ZHi) => near(p[2], 1.0),
            (Geometry::AnnularCylinder { height, .. }, Face::ZHi) => near(p[2], height),
            (Geometry::AnnularCylinder { r_inner, .. }, Face::InnerWall) => near(p[0].hypot(p[1]), r_inner),
            (Geometry::AnnularCylinder { r_outer, .. }, Face::OuterWall) => near(p[0].hypot(p[1]), r_outer),
            _ => false,
        }
    }

    /// Outward unit normal of `face` at `p`.
    pub fn outward_normal(&self, face: Face, p: [f64; 3]) -> [f64; 3] {
        match face {
            Face::XLo => [-1.0, 0.0, 0.0],
            Face::XHi => [1.0, 0.0, 0.0],
            Face::YLo => [0.0, -1.0, 0.0],
            Face::YHi => [0.0, 1.0, 0.0],
            Face::ZLo => [0.0, 0.0, -1.0],
            Face::ZHi => [0.0, 0.0, 1.0],
            Face::InnerWall | Face::OuterWall => {
                let r = p[0].hypot(p[1]);
                let sign = if face == Face::OuterWall { 1.0 } else { -1.0 };
                [sign * p[0] / r, sign * p[1] / r, 0.0]
            }
        }
    }

    /// Maps a point of the open unit cube into the domain interior.
    ///
    /// The cylinder uses `r = sqrt(ri^2 + u (ro^2 - ri^2))` so that points are
    /// uniform in area, `theta = 2 pi v` and `z = w h`.
    pub fn map_interior(&self, u: &[f64]) -> [f64; 3] {
        match *self {
            Geometry::UnitCube => [u[0], u[1], u[2]],
            Geometry::AnnularCylinder {
                r_inner,
                r_outer,
                height,
            } => {
                let r = area_uniform_radius(r_inner, r_outer, u[0]);
                let theta = 2.0 * PI * u[1];
                [r * theta.cos(), r * theta.sin(), u[2] * height]
            }
        }
    }

    /// Maps a point of the open unit square onto `face`.
    pub fn map_face(&self, face: Face, u: &[f64]) -> [f64; 3] {
        match (*self, face) {
            (Geometry::UnitCube, Face::XLo) => [0.0, u[0], u[1]],
            (Geometry::UnitCube, Face::XHi) => [1.0, u[0], u[1]],
            (Geometry::UnitCube, Face::YLo) => [u[0], 0.0, u[1]],
            (Geometry::UnitCube, Face::YHi) => [u[0], 1.0, u[1]],
            (Geometry::UnitCube, Face::ZLo) => [u[0], u[1], 0.0],
            (Geometry::UnitCube, Face::ZHi) => [u[0], u[1], 1.0],
            (
                Geometry::AnnularCylinder {
                    r_inner,
                    r_outer,
                    height,
                },
                face,
            ) => {
                let (r, theta, z) = match face {
                    Face::InnerWall => (r_inner, 2.0 * PI * u[0], u[1] * height),
                    Face::OuterWall => (r_outer, 2.0 * PI * u[0], u[1] * height),
                    Face::ZLo => (area_uniform_radius(r_inner, r_outer, u[0]), 2.0 * PI * u[1], 0.0),
                    Face::ZHi => (area_uniform_radius(r_inner, r_outer, u[0]), 2.0 * PI * u[1], height),
                    other => unreachable!("{other:?} is not a cylinder face"),
                };
                [r * theta.cos(), r * theta.sin(), z]
            }
            (Geometry::UnitCube, other) => unreachable!("{other:?} is not a cube face"),
        }
    }

    /// Center of the bounding box.
    pub fn centroid(&self) -> [f64; 3] {
        match *self {
            Geometry::UnitCube => [0.5; 3],
            Geometry::AnnularCylinder { height, .. } => [0.0, 0.0, 0.5 * height],
        }
    }
}

fn area_uniform_radius(r_inner: f64, r_outer: f64, u: f64) -> f64 {
    (r_inner * r_inner + u * (r_outer * r_outer - r_inner * r_inner)).sqrt()
}

/// Per-face stream for seeded samplers so faces do not repeat each other.
fn face_seed(seed: u64, face_index: usize) -> u64 {
    seed ^ ((face_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Samples `n_interior` interior points and `n_per_face` points on every
/// face. Boundary values are attached later by the physics layer.
pub fn sample_domain(
    kind: SamplerKind,
    geometry: Geometry,
    n_interior: usize,
    n_per_face: usize,
) -> Result<CollocationSet, SamplingError> {
    geometry.validate()?;
    if n_interior == 0 || n_per_face == 0 {
        return Err(SamplingError::EmptyRequest);
    }
    let interior = open_unit_points(kind, n_interior, 3)?
        .iter()
        .map(|u| geometry.map_interior(u))
        .collect();
    let mut boundary = Vec::with_capacity(n_per_face * geometry.faces().len());
    for (fi, &face) in geometry.faces().iter().enumerate() {
        let face_kind = match kind {
            SamplerKind::LatinHypercube { seed }
            | SamplerKind::MonteCarlo { seed }
            | SamplerKind::UniformRandom { seed } => kind.reseeded(face_seed(seed, fi)),
            other => other,
        };
        for u in open_unit_points(face_kind, n_per_face, 2)? {
            let point = geometry.map_face(face, &u);
            boundary.push(BoundaryPoint {
                point,
                normal: geometry.outward_normal(face, point),
                face,
            });
        }
    }
    Ok(CollocationSet {
        geometry,
        interior,
        boundary,
        dirichlet: Vec::new(),
        neumann: Vec::new(),
    })
}
