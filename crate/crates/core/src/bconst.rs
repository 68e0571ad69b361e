//! Lower bounds for the interpolation error constant
//!
//! `B_p^{m,k}(T) = sup |v - I_T^k v|_{m,p,T} / |v|_{k+1,p,T}`.
//!
//! The supremum is taken over the polynomial test space `P_{k+2}`. Both
//! numerator and denominator ignore `P_k`, so the space is represented by the
//! homogeneous polynomials of degrees `k+1` and `k+2` (dimension `2k+5`).
//! Every value produced here is therefore a LOWER bound for the true
//! constant. The space is invariant under translations, rotations and
//! scalings, so the bound inherits the scaling behaviour of the constant.
//!
//! For `p = 2` the restricted supremum is the largest generalized eigenvalue
//! of two Gram matrices. For other `p` it is estimated by random sampling
//! followed by coordinate-wise golden-section ascent.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Affine2, Point2, StandardForm, Triangle, TriangleMetrics};
use crate::interpolation::{interpolation_residual, validate_order};
use crate::norms::sobolev_seminorm_auto;
use crate::polynomial::{MomentTable, Poly2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EigenP2,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct BEstimate {
    pub value: f64,
    /// Test polynomial attaining `value`, in the coordinates of the input
    /// triangle.
    pub maximizer: Poly2,
    pub method: Method,
}

/// Quadratic forms of the `p = 2` problem on the test space.
#[derive(Debug, Clone)]
pub struct RayleighProblem {
    /// `|h - I h|²_{m,2}`
    pub m_form: DMatrix<f64>,
    /// `|h|²_{k+1,2}`
    pub n_form: DMatrix<f64>,
    basis: Vec<Poly2>,
    errors: Vec<Poly2>,
    shift: Point2,
}

/// Homogeneous monomials of degrees `k+1` and `k+2`.
pub fn test_space(k: usize) -> Vec<Poly2> {
    (k + 1..=k + 2)
        .flat_map(|d| (0..=d).map(move |j| Poly2::monomial(d - j, j, 1.0).expect("degree within cap")))
        .collect()
}

fn validate(m: usize, k: usize) -> Result<()> {
    validate_order(k)?;
    if m > k {
        return Err(Error::InvalidParameter(format!("order m = {m} must not exceed k = {k}")));
    }
    Ok(())
}

/// Translation placing the centroid at the origin. The test space and both
/// seminorms are translation invariant, and centring keeps the monomial
/// moments well conditioned.
fn centred(tri: &Triangle) -> Result<(Triangle, Point2)> {
    let c = tri.centroid();
    let shift = Affine2 {
        m: nalgebra::Matrix2::identity(),
        t: nalgebra::Vector2::new(-c.x, -c.y),
    };
    Ok((tri.mapped(&shift)?, c))
}

impl RayleighProblem {
    pub fn new(m: usize, k: usize, tri: &Triangle) -> Result<Self> {
        validate(m, k)?;
        let (local, shift) = centred(tri)?;
        let basis = test_space(k);
        let errors = basis
            .iter()
            .map(|h| interpolation_residual(h, k, &local))
            .collect::<Result<Vec<_>>>()?;
        let table = MomentTable::new(&local, 2 * (k + 2 - m))?;
        let n = basis.len();
        let mut m_form = DMatrix::zeros(n, n);
        let mut n_form = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let a = table.seminorm_inner(&errors[i], &errors[j], m);
                let b = table.seminorm_inner(&basis[i], &basis[j], k + 1);
                m_form[(i, j)] = a;
                m_form[(j, i)] = a;
                n_form[(i, j)] = b;
                n_form[(j, i)] = b;
            }
        }
        Ok(Self {
            m_form,
            n_form,
            basis,
            errors,
            shift,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Σ c_j h_j` in the coordinates of the original triangle.
    pub fn polynomial(&self, c: &[f64]) -> Poly2 {
        let mut p = Poly2::zeros(self.basis.last().map_or(0, Poly2::degree)).expect("degree within cap");
        for (h, cj) in self.basis.iter().zip(c) {
            p.add_scaled(h, *cj);
        }
        let back = Affine2 {
            m: nalgebra::Matrix2::identity(),
            t: nalgebra::Vector2::new(-self.shift.x, -self.shift.y),
        };
        p.compose_affine(&back)
    }

    /// `(h, h - I h)` for coefficients `c`, in centred coordinates.
    fn centred_pair(&self, c: &[f64]) -> (Poly2, Poly2) {
        let d = self.basis.last().map_or(0, Poly2::degree);
        let mut h = Poly2::zeros(d).expect("degree within cap");
        let mut e = Poly2::zeros(d).expect("degree within cap");
        for ((b, err), cj) in self.basis.iter().zip(&self.errors).zip(c) {
            h.add_scaled(b, *cj);
            e.add_scaled(err, *cj);
        }
        (h, e)
    }

    /// Largest generalized eigenpair of `(M, N)`, by Cholesky reduction to a
    /// symmetric eigenproblem.
    pub fn solve(&self) -> Result<(f64, Vec<f64>)> {
        let chol = Cholesky::new(self.n_form.clone())
            .ok_or_else(|| Error::Singular("denominator form is not positive definite".into()))?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("Cholesky factor".into()))?;
        let c = &l_inv * &self.m_form * l_inv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let (idx, lambda) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let y: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        let coeffs = l_inv.transpose() * y;
        Ok((lambda.max(0.0), coeffs.as_slice().to_vec()))
    }
}

/// `B_2^{m,k}(T)` restricted to the polynomial test space (exact for that
/// space up to rounding).
pub fn b_poly_lower(m: usize, k: usize, tri: &Triangle) -> Result<BEstimate> {
    let prob = RayleighProblem::new(m, k, tri)?;
    let (lambda, c) = prob.solve()?;
    Ok(BEstimate {
        value: lambda.sqrt(),
        maximizer: prob.polynomial(&c),
        method: Method::EigenP2,
    })
}

/// `|h - I h|_{m,p} / |h|_{k+1,p}` for the maximizer-style polynomial `h`.
pub fn seminorm_ratio(h: &Poly2, m: usize, k: usize, p: f64, tri: &Triangle) -> Result<f64> {
    let e = interpolation_residual(h, k, tri)?;
    let num = sobolev_seminorm_auto(&e, m, p, tri)?;
    let den = sobolev_seminorm_auto(h, k + 1, p, tri)?;
    Ok(num / den)
}

/// Number of coordinate-ascent steps after sampling.
pub const ASCENT_STEPS: usize = 50;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Sampled lower bound for general `p` (including `f64::INFINITY`).
///
/// Draws `samples` uniform directions on the unit sphere of the coefficient
/// space, keeps the best, then runs [`ASCENT_STEPS`] single-coordinate line
/// searches (coarse grid then golden section), accepting only improvements.
/// Deterministic for a given seed.
pub fn b_sample_lower(
    m: usize,
    k: usize,
    p: f64,
    tri: &Triangle,
    samples: usize,
    seed: u64,
) -> Result<BEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    let prob = RayleighProblem::new(m, k, tri)?;
    let (local, _) = centred(tri)?;
    let n = prob.dim();
    let ratio = |c: &[f64]| -> f64 {
        let (h, e) = prob.centred_pair(c);
        let num = sobolev_seminorm_auto(&e, m, p, &local);
        let den = sobolev_seminorm_auto(&h, k + 1, p, &local);
        match (num, den) {
            (Ok(a), Ok(b)) if b > 0.0 && a.is_finite() => a / b,
            _ => 0.0,
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dirs: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let values: Vec<f64> = dirs.par_iter().map(|c| ratio(c)).collect();
    let (best_idx, mut best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let mut c = dirs[best_idx].clone();

    for step in 0..ASCENT_STEPS {
        let j = step % n;
        let along = |t: f64| {
            let mut trial = c.clone();
            trial[j] += t;
            ratio(&trial)
        };
        let grid: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&t| along(t)).collect();
        let (gi, _) = vals
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let (mut a, mut b) = (grid[gi] - 0.25, grid[gi] + 0.25);
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let (mut f1, mut f2) = (along(x1), along(x2));
        for _ in 0..30 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = along(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = along(x1);
            }
        }
        let (t, ft) = [(grid[gi], vals[gi]), (x1, f1), (x2, f2)]
            .into_iter()
            .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
        if ft > best {
            best = ft;
            c[j] += t;
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.iter_mut().for_each(|x| *x /= norm);
        }
    }

    Ok(BEstimate {
        value: best,
        maximizer: prob.polynomial(&c),
        method: Method::Sampled,
    })
}

/// `value / (R^m h_K^{k+1-2m})`, bounded uniformly over all triangles by
/// the circumradius estimate.
pub fn bound_ratio(est: &BEstimate, met: &TriangleMetrics, m: usize, k: usize) -> f64 {
    let e = k as i32 + 1 - 2 * m as i32;
    est.value / (met.circumradius.powi(m as i32) * met.h_k.powi(e))
}

/// One row of a constant sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub m: usize,
    pub k: usize,
    pub p: f64,
    #[serde(rename = "hK")]
    pub h_k: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub rho: f64,
    pub theta_max: f64,
    #[serde(rename = "B_lower")]
    pub b_lower: f64,
    pub bound_ratio: f64,
}

impl BoundRow {
    pub const CSV_HEADER: [&'static str; 9] =
        ["m", "k", "p", "hK", "R", "rho", "theta_max", "B_lower", "bound_ratio"];

    pub fn new(est: &BEstimate, met: &TriangleMetrics, m: usize, k: usize, p: f64) -> Self {
        Self {
            m,
            k,
            p,
            h_k: met.h_k,
            r: met.circumradius,
            rho: met.rho,
            theta_max: met.theta_max,
            b_lower: est.value,
            bound_ratio: bound_ratio(est, met, m, k),
        }
    }
}

/// `p = 2` estimate when `p == 2`, sampled otherwise.
pub fn b_lower(m: usize, k: usize, p: f64, tri: &Triangle, samples: usize, seed: u64) -> Result<BEstimate> {
    if p == 2.0 {
        b_poly_lower(m, k, tri)
    } else {
        b_sample_lower(m, k, p, tri, samples, seed)
    }
}

/// Both sides of the comparison between a standard-position triangle and the
/// right triangle `K_α` with the same `α`:
/// `B(K) ≤ (1+|s|)/√(1-|s|) · B(K_α)` for `m = k = 1`, `p = 2`.
pub fn standard_vs_squeezed(sf: &StandardForm) -> Result<(f64, f64)> {
    let k_tri = sf.triangle()?;
    let k_alpha = Triangle::squeezed(sf.alpha)?;
    let lhs = b_poly_lower(1, 1, &k_tri)?.value;
    let factor = (1.0 + sf.s.abs()) / (1.0 - sf.s.abs()).sqrt();
    Ok((lhs, factor * b_poly_lower(1, 1, &k_alpha)?.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metrics;
    use approx::assert_relative_eq;

    #[test]
    fn candidate_bounds_on_unit_triangle() {
        let t = Triangle::unit_right();
        let b11 = b_poly_lower(1, 1, &t).unwrap();
        assert!(b11.value >= 1.0 / 12f64.sqrt() - 1e-14);
        let b01 = b_poly_lower(0, 1, &t).unwrap();
        assert!(b01.value >= 1.0 / 120f64.sqrt() - 1e-14);
    }

    #[test]
    fn frozen_values_on_unit_triangle() {
        // independent oracle: rational integrals and a dense generalized
        // eigen-solve over the same test space
        let t = Triangle::unit_right();
        let frozen = [
            ((0, 1), 0.1654097524519058),
            ((1, 1), 0.4857108250618819),
            ((1, 2), 0.07047525950993744),
            ((2, 2), 0.39324993262327074),
            ((2, 3), 0.07220279070747872),
        ];
        for ((m, k), want) in frozen {
            let got = b_poly_lower(m, k, &t).unwrap().value;
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn maximizer_reproduces_value() {
        let t = Triangle::new(Point2::new(0.3, 0.1), Point2::new(1.2, 0.4), Point2::new(0.1, 0.8)).unwrap();
        for (m, k) in [(0, 1), (1, 1), (1, 2), (2, 3)] {
            let est = b_poly_lower(m, k, &t).unwrap();
            let direct = seminorm_ratio(&est.maximizer, m, k, 2.0, &t).unwrap();
            assert_relative_eq!(direct, est.value, max_relative = 1e-10);
        }
    }

    #[test]
    fn rotation_invariance() {
        let t = Triangle::equilateral(1.0).unwrap();
        let rot = Affine2::linear(nalgebra::Matrix2::new(0.0, -1.0, 1.0, 0.0));
        let r = t.mapped(&rot).unwrap();
        for (m, k) in [(0, 1), (1, 1), (1, 2), (2, 2), (2, 3)] {
            let a = b_poly_lower(m, k, &t).unwrap().value;
            let b = b_poly_lower(m, k, &r).unwrap().value;
            assert!((a - b).abs() < 1e-10, "({m},{k}) {a} vs {b}");
        }
    }

    #[test]
    fn bound_ratio_examples() {
        let t = Triangle::unit_right();
        let est = b_poly_lower(1, 1, &t).unwrap();
        let met = metrics(&t);
        assert_relative_eq!(
            bound_ratio(&est, &met, 1, 1),
            est.value / (2f64.sqrt() / 2.0),
            max_relative = 1e-14
        );
        let est0 = b_poly_lower(0, 1, &t).unwrap();
        assert_relative_eq!(bound_ratio(&est0, &met, 0, 1), est0.value / 2.0, max_relative = 1e-14);
        let ratios: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&h| {
                let t = Triangle::equilateral(h).unwrap();
                bound_ratio(&b_poly_lower(1, 1, &t).unwrap(), &metrics(&t), 1, 1)
            })
            .collect();
        assert!((ratios[0] - ratios[1]).abs() < 1e-8);
        assert!((ratios[0] - ratios[2]).abs() < 1e-8);
    }

    #[test]
    fn sampling_examples() {
        let t = Triangle::unit_right();
        let exact = b_poly_lower(1, 1, &t).unwrap().value;
        let s = b_sample_lower(1, 1, 2.0, &t, 2000, 0).unwrap();
        assert!(s.value <= exact + 1e-8);
        assert!(s.value >= 0.95 * exact);
        let x2 = Poly2::monomial(2, 0, 1.0).unwrap();
        assert_relative_eq!(seminorm_ratio(&x2, 1, 1, f64::INFINITY, &t).unwrap(), 0.5, epsilon = 1e-14);
        let a = b_sample_lower(1, 1, 1.0, &t, 1, 7).unwrap().value;
        let b = b_sample_lower(1, 1, 1.0, &t, 1, 7).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn invalid_orders() {
        let t = Triangle::unit_right();
        assert!(b_poly_lower(2, 1, &t).is_err());
        assert!(b_poly_lower(0, 6, &t).is_err());
        assert!(b_sample_lower(1, 1, 2.0, &t, 0, 0).is_err());
    }
}
