use super::{flux, PhysicsError};
use crate::bench::CaseId;
use crate::sampling::{CollocationSet, DirichletPoint, Face, NeumannPoint};

enum Condition {
    Dirichlet(f64),
    /// Insulated face.
    ZeroFlux,
    /// Flux taken from the case's closed-form solution.
    ExactFlux,
}

fn condition(case: CaseId, face: Face) -> Condition {
    match case {
        CaseId::Case1Parabolic | CaseId::Case1Exponential | CaseId::Case1Trigonometric => match face {
            Face::ZLo => Condition::Dirichlet(0.0),
            Face::ZHi => Condition::Dirichlet(100.0),
            _ => Condition::ZeroFlux,
        },
        CaseId::Case2Poly3D => match face {
            Face::XLo | Face::YLo | Face::ZLo => Condition::Dirichlet(0.0),
            _ => Condition::ExactFlux,
        },
        CaseId::Case3Cylinder => match face {
            Face::InnerWall => Condition::Dirichlet(0.0),
            Face::OuterWall => Condition::Dirichlet(100.0),
            _ => Condition::ZeroFlux,
        },
    }
}

/// Moves every pending boundary point of `set` into the Dirichlet or
/// Neumann list with the value the case prescribes on its face.
///
/// Case 1: `phi = 0` at `z = 0`, `phi = 100` at `z = 1`, insulated sides.
/// Case 2: `phi = 0` on the three faces through the origin, exact flux on the
/// three opposite faces. Case 3: `phi = 0` on the bore, `phi = 100` on the
/// outer wall, insulated flats.
pub fn attach_case_bcs(case: CaseId, mut set: CollocationSet) -> Result<CollocationSet, PhysicsError> {
    if set.geometry != case.geometry() {
        return Err(PhysicsError::GeometryMismatch {
            case: case.name(),
            geometry: format!("{:?}", set.geometry),
        });
    }
    let model = case.material();
    let exact = case.solution();
    for b in std::mem::take(&mut set.boundary) {
        match condition(case, b.face) {
            Condition::Dirichlet(value) => set.dirichlet.push(DirichletPoint {
                point: b.point,
                face: b.face,
                value,
            }),
            Condition::ZeroFlux => set.neumann.push(NeumannPoint {
                point: b.point,
                normal: b.normal,
                face: b.face,
                flux: 0.0,
            }),
            Condition::ExactFlux => set.neumann.push(NeumannPoint {
                point: b.point,
                normal: b.normal,
                face: b.face,
                flux: flux(&exact, &model, b.point, b.normal)?,
            }),
        }
    }
    Ok(set)
}
