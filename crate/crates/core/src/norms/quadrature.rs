//! Quadrature on triangles.
//!
//! Degrees 1 and 2 use the centroid and edge-midpoint rules. Higher degrees
//! use a collapsed (Duffy) product of Gauss–Legendre rules. Every rule is
//! checked against [`integrate_monomial`] when the table is first built.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{Point2, Triangle};
use crate::polynomial::integrate_monomial;

pub const MAX_RULE_DEGREE: usize = 20;

/// Points in barycentric coordinates with weights summing to one.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Physical points and area-scaled weights on `tri`.
    pub fn mapped(&self, tri: &Triangle) -> impl Iterator<Item = (Point2, f64)> + '_ {
        let tri = *tri;
        let area = tri.area();
        self.points
            .iter()
            .zip(self.weights.iter())
            .map(move |(b, w)| (tri.point_at(*b), w * area))
    }

    pub fn integrate(&self, tri: &Triangle, f: impl Fn(Point2) -> f64) -> f64 {
        self.mapped(tri).map(|(x, w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = 0.5 * (1.0 - x);
        ws[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn collapsed_rule(degree: usize) -> QuadratureRule {
    let n = (degree + 2).div_ceil(2);
    let (xs, ws) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (u, wu) in xs.iter().zip(ws.iter()) {
        for (v, wv) in xs.iter().zip(ws.iter()) {
            let x = *u;
            let y = (1.0 - u) * v;
            points.push([1.0 - x - y, x, y]);
            // reference area 1/2 normalised to 1
            weights.push(2.0 * wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        exactness_degree: degree,
    }
}

fn build(degree: usize) -> QuadratureRule {
    match degree {
        1 => QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            exactness_degree: 1,
        },
        2 => QuadratureRule {
            points: vec![[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]],
            weights: vec![1.0 / 3.0; 3],
            exactness_degree: 2,
        },
        d => collapsed_rule(d),
    }
}

/// Largest relative error of `rule` over all barycentric monomials of total
/// degree up to its exactness degree.
pub fn exactness_defect(rule: &QuadratureRule) -> f64 {
    let tri = Triangle::unit_right();
    let d = rule.exactness_degree;
    let mut worst: f64 = 0.0;
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                let exact = integrate_monomial(&tri, a, b, c).expect("small exponents");
                let approx: f64 = rule
                    .points
                    .iter()
                    .zip(rule.weights.iter())
                    .map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                    .sum::<f64>()
                    * tri.area();
                worst = worst.max(((approx - exact) / exact).abs());
            }
        }
    }
    worst
}

fn table() -> &'static [QuadratureRule] {
    static TABLE: OnceLock<Vec<QuadratureRule>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_RULE_DEGREE)
            .map(|d| {
                let rule = build(d);
                let defect = exactness_defect(&rule);
                assert!(defect < 1e-13, "quadrature rule of degree {d} fails validation ({defect:e})");
                rule
            })
            .collect()
    })
}

/// Rule exact for polynomials of total degree `degree`.
pub fn quad_rule(degree: usize) -> Result<&'static QuadratureRule> {
    if !(1..=MAX_RULE_DEGREE).contains(&degree) {
        return Err(Error::QuadratureDegree(degree));
    }
    Ok(&table()[degree - 1])
}

/// Extra degrees added to automatically chosen rules, read once from
/// `CIRCUM_QUAD_BUMP` (default 2).
pub fn degree_bump() -> usize {
    static BUMP: OnceLock<usize> = OnceLock::new();
    *BUMP.get_or_init(|| {
        std::env::var("CIRCUM_QUAD_BUMP")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or(2)
    })
}

/// Rule for an integrand of nominal degree `degree` plus the global bump,
/// capped at the table maximum.
pub fn rule_for_degree(degree: usize) -> &'static QuadratureRule {
    let d = (degree + degree_bump()).clamp(1, MAX_RULE_DEGREE);
    &table()[d - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degree_examples() {
        let t = Triangle::unit_right();
        let r1 = quad_rule(1).unwrap();
        assert_relative_eq!(r1.integrate(&t, |p| p.x), 1.0 / 6.0, epsilon = 1e-16);
        let r2 = quad_rule(2).unwrap();
        assert_eq!(r2.len(), 3);
        assert_relative_eq!(r2.integrate(&t, |p| p.x * p.x), 1.0 / 12.0, epsilon = 1e-16);
    }

    #[test]
    fn degree_ten_is_exact() {
        let t = Triangle::unit_right();
        let r = quad_rule(10).unwrap();
        let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
        for d in 0..=10 {
            for j in 0..=d {
                let i = d - j;
                let exact = fact(i) * fact(j) / fact(d + 2);
                let got = r.integrate(&t, |p| p.x.powi(i as i32) * p.y.powi(j as i32));
                assert_relative_eq!(got, exact, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn weights_sum_to_one_for_all_rules() {
        for d in 1..=MAX_RULE_DEGREE {
            let r = quad_rule(d).unwrap();
            assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            assert!(exactness_defect(r) < 1e-13);
        }
    }

    #[test]
    fn out_of_range_degree() {
        assert!(matches!(quad_rule(0), Err(Error::QuadratureDegree(0))));
        assert!(matches!(quad_rule(21), Err(Error::QuadratureDegree(21))));
    }
}
