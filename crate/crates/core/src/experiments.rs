//! Triangle families and sweep drivers.
//!
//! Three families are provided:
//!
//! - alpha-beta: `(0,0), (h,0), (h^α, h^β)` with `1 < α < β < 1 + α`. The
//!   maximum angle tends to π while `R = O(h^{1+α-β})` still vanishes.
//! - squeeze: the right triangle `K_α = (0,0), (1,0), (0,α)`.
//! - theta-sweep: standard-position triangles `(0,0), (1,0), (α cos θ, α sin θ)`.
//!
//! Each sweep is indexed by a scalar parameter (`h`, `α` or `θ`). Rates are
//! fitted against the family's natural small quantity: `h`, `α`, or `π - θ`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bconst::{b_lower, BEstimate, BoundRow};
use crate::error::{Error, Result};
use crate::geometry::{metrics, Point2, StandardForm, Triangle, TriangleMetrics};
use crate::interpolation::{validate_order, ErrorField};
use crate::norms::{sobolev_seminorm_auto, FieldWithDerivatives};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    AlphaBeta { alpha: f64, beta: f64 },
    Squeeze,
    ThetaSweep { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySpec {
    #[serde(flatten)]
    pub kind: FamilyKind,
    /// `h` values, `α` values or angles in radians, coarsest first.
    pub params: Vec<f64>,
    /// Every triangle is multiplied by this factor (1 for the plain family).
    pub scale: f64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, params: Vec<f64>) -> Result<Self> {
        let spec = Self {
            kind,
            params,
            scale: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn alpha_beta(alpha: f64, beta: f64, hs: Vec<f64>) -> Result<Self> {
        Self::new(FamilyKind::AlphaBeta { alpha, beta }, hs)
    }

    pub fn squeeze(alphas: Vec<f64>) -> Result<Self> {
        Self::new(FamilyKind::Squeeze, alphas)
    }

    pub fn theta_sweep(alpha: f64, thetas: Vec<f64>) -> Result<Self> {
        Self::new(FamilyKind::ThetaSweep { alpha }, thetas)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {scale} must be positive")));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        validate_kind(&self.kind)?;
        for &x in &self.params {
            validate_param(&self.kind, x)?;
        }
        Ok(())
    }

    /// The quantity rates are fitted against.
    pub fn rate_variable(&self, param: f64) -> f64 {
        match self.kind {
            FamilyKind::ThetaSweep { .. } => PI - param,
            _ => param,
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            FamilyKind::AlphaBeta { alpha, beta } => format!("alpha-beta(alpha={alpha}, beta={beta})"),
            FamilyKind::Squeeze => "squeeze".to_string(),
            FamilyKind::ThetaSweep { alpha } => format!("theta-sweep(alpha={alpha})"),
        }
    }
}

fn validate_kind(kind: &FamilyKind) -> Result<()> {
    match *kind {
        FamilyKind::AlphaBeta { alpha, beta } => {
            if !(1.0 < alpha && alpha < beta && beta < 1.0 + alpha) {
                return Err(Error::InvalidParameter(format!(
                    "alpha-beta family needs 1 < alpha < beta < 1 + alpha, got alpha = {alpha}, beta = {beta}"
                )));
            }
        }
        FamilyKind::Squeeze => {}
        FamilyKind::ThetaSweep { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1]")));
            }
        }
    }
    Ok(())
}

fn validate_param(kind: &FamilyKind, x: f64) -> Result<()> {
    let ok = match *kind {
        FamilyKind::AlphaBeta { .. } => x > 0.0 && x < 1.0,
        FamilyKind::Squeeze => x > 0.0 && x <= 1.0,
        FamilyKind::ThetaSweep { .. } => x < PI && x > 0.0,
    };
    if !ok {
        return Err(Error::InvalidParameter(format!("family parameter {x} out of range")));
    }
    Ok(())
}

/// The member of `kind` for parameter `param`, unscaled.
pub fn family_triangle(kind: &FamilyKind, param: f64) -> Result<Triangle> {
    validate_kind(kind)?;
    validate_param(kind, param)?;
    match *kind {
        FamilyKind::AlphaBeta { alpha, beta } => Triangle::new(
            Point2::new(0.0, 0.0),
            Point2::new(param, 0.0),
            Point2::new(param.powf(alpha), param.powf(beta)),
        ),
        FamilyKind::Squeeze => Triangle::squeezed(param),
        FamilyKind::ThetaSweep { alpha } => StandardForm::from_angle(alpha, param)?.triangle(),
    }
}

fn spec_triangle(spec: &FamilySpec, param: f64) -> Result<Triangle> {
    let t = family_triangle(&spec.kind, param)?;
    if spec.scale == 1.0 {
        Ok(t)
    } else {
        t.scaled(spec.scale)
    }
}

/// Bound shapes compared in a sweep, all without constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundShapes {
    /// `h_K^{k+1} / ρ^m`
    pub standard: f64,
    /// `R^m h_K^{k+1-2m}`
    pub circum: f64,
    /// `h_K^{k+1-m} / cos(θ_max/2)^m`
    pub jamet: f64,
}

pub fn bound_shapes(met: &TriangleMetrics, k: usize, m: usize) -> BoundShapes {
    let (ki, mi) = (k as i32, m as i32);
    BoundShapes {
        standard: met.h_k.powi(ki + 1) / met.rho.powi(mi),
        circum: met.circumradius.powi(mi) * met.h_k.powi(ki + 1 - 2 * mi),
        jamet: met.h_k.powi(ki + 1 - mi) / (met.theta_max / 2.0).cos().powi(mi),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub h: f64,
    #[serde(rename = "hK")]
    pub h_k: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub rho: f64,
    pub theta_max: f64,
    pub ratio_measured: f64,
    pub bound_standard: f64,
    pub bound_circum: f64,
    pub bound_jamet: f64,
    pub rate_local: f64,
}

impl SweepRow {
    pub const CSV_HEADER: [&'static str; 10] = [
        "h",
        "hK",
        "R",
        "rho",
        "theta_max",
        "ratio_measured",
        "bound_standard",
        "bound_circum",
        "bound_jamet",
        "rate_local",
    ];

    pub fn csv_values(&self) -> [f64; 10] {
        [
            self.h,
            self.h_k,
            self.r,
            self.rho,
            self.theta_max,
            self.ratio_measured,
            self.bound_standard,
            self.bound_circum,
            self.bound_jamet,
            self.rate_local,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub family: FamilySpec,
    pub field: String,
    pub k: usize,
    pub m: usize,
    pub p: f64,
    /// Points dropped from the coarse end before fitting.
    pub dropped: usize,
    pub fitted_rate: f64,
    pub fitted_standard: f64,
    pub fitted_circum: f64,
    pub fitted_jamet: f64,
    /// Exponents of the bound shapes on the alpha-beta family.
    pub predicted_standard: Option<f64>,
    pub predicted_circum: Option<f64>,
    /// Whether the standard bound shape vanishes as the parameter shrinks.
    pub standard_convergent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            expected: xs.len(),
            got: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("a slope needs at least 2 points".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// Number of coarse points dropped by [`fit_rate`] for `n` points.
pub fn dropped_points(n: usize) -> usize {
    2.min(n.saturating_sub(3))
}

/// Log-log slope after dropping the two coarsest points (fewer if that
/// would leave less than three). Inputs are ordered coarse to fine.
pub fn fit_rate(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 3 values, got {}",
            xs.len()
        )));
    }
    let d = dropped_points(xs.len());
    log_slope(&xs[d..], &ys[d..])
}

/// `|v - I v|_{m,p,K} / |v|_{k+1,p,K}`
pub fn measured_ratio(
    v: &dyn FieldWithDerivatives,
    tri: &Triangle,
    k: usize,
    m: usize,
    p: f64,
) -> Result<f64> {
    let e = ErrorField::new(v, k, tri)?;
    let num = sobolev_seminorm_auto(&e, m, p, tri)?;
    let den = sobolev_seminorm_auto(v, k + 1, p, tri)?;
    Ok(num / den)
}

/// Interpolation-error sweep over a family. Rows are computed in parallel
/// and returned in parameter order.
pub fn sweep_rate(
    spec: &FamilySpec,
    v: &dyn FieldWithDerivatives,
    k: usize,
    m: usize,
    p: f64,
) -> Result<Sweep> {
    spec.validate()?;
    validate_order(k)?;
    if m > k {
        return Err(Error::InvalidParameter(format!("order m = {m} must not exceed k = {k}")));
    }
    v.require_order(k + 1)?;
    if spec.params.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 3 values, got {}",
            spec.params.len()
        )));
    }
    let partial: Vec<(f64, TriangleMetrics, f64)> = spec
        .params
        .par_iter()
        .map(|&h| {
            let tri = spec_triangle(spec, h)?;
            let met = metrics(&tri);
            Ok((h, met, measured_ratio(v, &tri, k, m, p)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<SweepRow> = Vec::with_capacity(partial.len());
    for (i, (h, met, ratio)) in partial.iter().enumerate() {
        let b = bound_shapes(met, k, m);
        let rate_local = if i == 0 {
            f64::NAN
        } else {
            let prev = &rows[i - 1];
            (ratio / prev.ratio_measured).ln()
                / (spec.rate_variable(*h) / spec.rate_variable(prev.h)).ln()
        };
        rows.push(SweepRow {
            h: *h,
            h_k: met.h_k,
            r: met.circumradius,
            rho: met.rho,
            theta_max: met.theta_max,
            ratio_measured: *ratio,
            bound_standard: b.standard,
            bound_circum: b.circum,
            bound_jamet: b.jamet,
            rate_local,
        });
    }

    let xs: Vec<f64> = rows.iter().map(|r| spec.rate_variable(r.h)).collect();
    let col = |f: fn(&SweepRow) -> f64| -> Vec<f64> { rows.iter().map(f).collect() };
    let fitted_standard = fit_rate(&xs, &col(|r| r.bound_standard))?;
    let (predicted_standard, predicted_circum) = match spec.kind {
        FamilyKind::AlphaBeta { alpha, beta } => {
            let (kf, mf) = (k as f64, m as f64);
            (
                Some(kf + 1.0 - mf * beta),
                Some(mf * (1.0 + alpha - beta) + kf + 1.0 - 2.0 * mf),
            )
        }
        _ => (None, None),
    };
    let summary = SweepSummary {
        family: spec.clone(),
        field: v.name().to_string(),
        k,
        m,
        p,
        dropped: dropped_points(rows.len()),
        fitted_rate: fit_rate(&xs, &col(|r| r.ratio_measured))?,
        fitted_standard,
        fitted_circum: fit_rate(&xs, &col(|r| r.bound_circum))?,
        fitted_jamet: fit_rate(&xs, &col(|r| r.bound_jamet))?,
        predicted_standard,
        predicted_circum,
        standard_convergent: predicted_standard.unwrap_or(fitted_standard) > 0.0,
    };
    Ok(Sweep { rows, summary })
}

#[derive(Debug, Clone, Serialize)]
pub struct SqueezeRow {
    pub alpha: f64,
    pub value: f64,
    pub method: crate::bconst::Method,
}

/// Error-constant lower bounds on `K_α` for each `α`. Uses the exact
/// `p = 2` eigenproblem, or sampling with `samples` and `seed` otherwise.
pub fn squeeze_sweep(
    alphas: &[f64],
    k: usize,
    m: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<SqueezeRow>> {
    let spec = FamilySpec::squeeze(alphas.to_vec())?;
    spec.params
        .par_iter()
        .map(|&a| {
            let tri = Triangle::squeezed(a)?;
            let est: BEstimate = b_lower(m, k, p, &tri, samples, seed)?;
            Ok(SqueezeRow {
                alpha: a,
                value: est.value,
                method: est.method,
            })
        })
        .collect()
}

/// Error-constant lower bounds with their circumradius ratios over a family.
pub fn bound_sweep(
    spec: &FamilySpec,
    m: usize,
    k: usize,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<Vec<BoundRow>> {
    spec.validate()?;
    spec.params
        .par_iter()
        .map(|&x| {
            let tri = spec_triangle(spec, x)?;
            let est = b_lower(m, k, p, &tri, samples, seed)?;
            Ok(BoundRow::new(&est, &metrics(&tri), m, k, p))
        })
        .collect()
}

/// `((cos(θ/2))^{-m}, (1/sin θ)^m)` for a maximum angle `θ`.
pub fn jamet_factors(theta_max: f64, m: usize) -> (f64, f64) {
    let mi = m as i32;
    ((theta_max / 2.0).cos().powi(-mi), theta_max.sin().powi(-mi))
}

/// Maximum-angle factor versus the semiregularity factor `(2R/h_K)^m`.
pub fn jamet_compare(tri: &Triangle, m: usize) -> (f64, f64) {
    let met = metrics(tri);
    let jamet = (met.theta_max / 2.0).cos().powi(-(m as i32));
    (jamet, (2.0 * met.semiregularity).powi(m as i32))
}

/// Angles from `lo` to `hi` degrees, `n` evenly spaced values, in radians.
pub fn degree_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).to_radians())
        .collect()
}

/// `2^{-3}, 2^{-4}, …` down to `hmin` inclusive.
pub fn dyadic_hs(hmin: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut h = 0.125;
    while h >= hmin * (1.0 - 1e-12) {
        out.push(h);
        h *= 0.5;
    }
    out
}
