//! Convergence studies on the criss-cross family.

use serde::Serialize;

use super::mesh::{aniso_layout, gen_aniso_mesh};
use super::{fem_errors, global_interp_error, solve_poisson};
use crate::error::{Error, Result};
use crate::experiments::log_slope;
use crate::norms::FieldWithDerivatives;

#[derive(Debug, Clone, Serialize)]
pub struct StudyRow {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "maxR")]
    pub max_r: f64,
    #[serde(rename = "maxTheta")]
    pub max_theta: f64,
    #[serde(rename = "maxChunk")]
    pub max_chunk: f64,
    /// `|u - u_h|_{1,2}`, NaN when the solve was skipped.
    pub h1err: f64,
    /// `‖u - u_h‖_{0,2}`, NaN when the solve was skipped.
    pub l2err: f64,
    /// `|u - I_h^1 u|_{1,2}`
    #[serde(rename = "interpErr")]
    pub interp_err: f64,
    pub cg_iterations: usize,
}

impl StudyRow {
    pub const CSV_HEADER: [&'static str; 9] =
        ["n", "a", "b", "maxR", "maxTheta", "maxChunk", "h1err", "l2err", "interpErr"];
}

/// Log-log slopes against `a = 1/n` over all rows.
#[derive(Debug, Clone, Serialize)]
pub struct StudyRates {
    pub h1: Option<f64>,
    pub l2: Option<f64>,
    pub interp: f64,
    /// Ratios `interpErr(n_{i+1}) / interpErr(n_i)`.
    pub interp_ratios: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Study {
    pub q: f64,
    pub rows: Vec<StudyRow>,
    pub rates: StudyRates,
}

/// Solves on `gen_aniso_mesh(n, q)` for each `n` (unless `solve` is false)
/// and measures solution and interpolation errors against `u`, where
/// `f = -Δu` and `u` vanishes on the boundary.
pub fn convergence_study(
    q: f64,
    ns: &[usize],
    u: &dyn FieldWithDerivatives,
    f: &dyn FieldWithDerivatives,
    solve: bool,
) -> Result<Study> {
    if ns.len() < 2 {
        return Err(Error::InvalidParameter("a study needs at least 2 mesh sizes".into()));
    }
    u.require_order(1)?;
    // validate every size before doing any work
    for &n in ns {
        aniso_layout(n, q)?;
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let layout = aniso_layout(n, q)?;
        let mesh = gen_aniso_mesh(n, q)?;
        let quality = mesh.quality();
        let interp_err = global_interp_error(&mesh, u, 1, 2.0)?;
        let (h1err, l2err, cg_iterations) = if solve {
            let (uh, cg) = solve_poisson(&mesh, f)?;
            let (h1, l2) = fem_errors(&mesh, u, &uh);
            (h1, l2, cg.iterations)
        } else {
            (f64::NAN, f64::NAN, 0)
        };
        rows.push(StudyRow {
            n,
            a: layout.a,
            b: layout.b,
            max_r: quality.max_circumradius,
            max_theta: quality.max_angle,
            max_chunk: quality.max_chunkiness,
            h1err,
            l2err,
            interp_err,
            cg_iterations,
        });
    }
    let a: Vec<f64> = rows.iter().map(|r| r.a).collect();
    let col = |f: fn(&StudyRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    let rates = StudyRates {
        h1: if solve { Some(log_slope(&a, &col(|r| r.h1err))?) } else { None },
        l2: if solve { Some(log_slope(&a, &col(|r| r.l2err))?) } else { None },
        interp: log_slope(&a, &col(|r| r.interp_err))?,
        interp_ratios: rows.windows(2).map(|w| w[1].interp_err / w[0].interp_err).collect(),
    };
    Ok(Study { q, rows, rates })
}
