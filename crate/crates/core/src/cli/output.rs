//! Text formats written by runs. Floats use 17 significant digits in
//! scientific notation so that identical runs give identical bytes.

use std::fmt::Write as _;

use crate::bench::{CaseEvaluation, FieldRow, ProfileRow};
use crate::optim::TrainHistory;
use crate::sampling::CollocationSet;

pub const CONVERGENCE_HEADER: &str = "iter,phase,total,mse_g,mse_d,mse_n";
pub const TIMING_HEADER: &str = "iter,ms";
pub const FIELDS_HEADER: &str = "x,y,z,phi_pred,phi_exact,q_pred,q_exact,abs_err";
pub const SAMPLES_HEADER: &str = "x,y,z,kind,nx,ny,nz,prescribed";
pub const PROFILE_HEADER: &str = "s,x,y,z,phi_pred,phi_exact,q_pred,q_exact";

/// `{:.16e}`, the fixed float format of every table.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",")
}

pub fn convergence_csv(history: &TrainHistory) -> String {
    let mut out = String::from(CONVERGENCE_HEADER);
    out.push('\n');
    for r in &history.records {
        let l = &r.loss;
        let _ = writeln!(
            out,
            "{},{},{}",
            r.iter,
            r.phase.name(),
            join(&[l.total, l.mse_g, l.mse_d, l.mse_n])
        );
    }
    out
}

/// Wall-clock column kept apart from the convergence table, which must be
/// reproducible byte for byte.
pub fn timing_csv(history: &TrainHistory) -> String {
    let mut out = String::from(TIMING_HEADER);
    out.push('\n');
    for r in &history.records {
        let _ = writeln!(out, "{},{:.3}", r.iter, r.ms);
    }
    out
}

pub fn fields_csv(eval: &CaseEvaluation) -> String {
    let mut out = String::from(FIELDS_HEADER);
    out.push('\n');
    for r in &eval.rows {
        let p = r.point;
        out.push_str(&join(&[
            p[0],
            p[1],
            p[2],
            r.phi_pred,
            r.phi_exact,
            r.q_pred,
            r.q_exact,
            r.abs_err,
        ]));
        out.push('\n');
    }
    out
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from(PROFILE_HEADER);
    out.push('\n');
    for r in rows {
        let p = r.point;
        out.push_str(&join(&[
            r.s,
            p[0],
            p[1],
            p[2],
            r.phi_pred,
            r.phi_exact,
            r.q_pred,
            r.q_exact,
        ]));
        out.push('\n');
    }
    out
}

type Column = (&'static str, fn(&FieldRow) -> f64);

/// Legacy ASCII VTK structured grid with the evaluation table as point data.
pub fn fields_vtk(eval: &CaseEvaluation) -> String {
    let dims = eval.grid.dims();
    let n = eval.rows.len();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "potential field {}", eval.case.name());
    out.push_str("ASCII\nDATASET STRUCTURED_GRID\n");
    let _ = writeln!(out, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]);
    let _ = writeln!(out, "POINTS {n} double");
    for r in &eval.rows {
        let _ = writeln!(out, "{} {} {}", num(r.point[0]), num(r.point[1]), num(r.point[2]));
    }
    let _ = writeln!(out, "POINT_DATA {n}");
    let columns: [Column; 5] = [
        ("phi_pred", |r| r.phi_pred),
        ("phi_exact", |r| r.phi_exact),
        ("q_pred", |r| r.q_pred),
        ("q_exact", |r| r.q_exact),
        ("abs_err", |r| r.abs_err),
    ];
    for (name, get) in columns {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for r in &eval.rows {
            out.push_str(&num(get(r)));
            out.push('\n');
        }
    }
    out
}

/// Every collocation point with its role, normal (zero inside) and
/// prescribed value (empty inside).
pub fn samples_csv(set: &CollocationSet) -> String {
    let mut out = String::from(SAMPLES_HEADER);
    out.push('\n');
    let mut row = |p: [f64; 3], kind: &str, n: [f64; 3], prescribed: Option<f64>| {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            join(&p),
            kind,
            join(&n),
            prescribed.map(num).unwrap_or_default()
        );
    };
    for &p in &set.interior {
        row(p, "interior", [0.0; 3], None);
    }
    for d in &set.dirichlet {
        row(
            d.point,
            "dirichlet",
            set.geometry.outward_normal(d.face, d.point),
            Some(d.value),
        );
    }
    for q in &set.neumann {
        row(q.point, "neumann", q.normal, Some(q.flux));
    }
    out
}
