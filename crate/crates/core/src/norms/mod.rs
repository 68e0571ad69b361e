//! Sobolev seminorms on triangles, the `τ`/`γ` vector-norm exponents and the
//! scaling law under `x ↦ Y x`.
//!
//! Throughout, `|v|_{m,p,T}` is the `ℓ^p` norm of the full order-m derivative
//! tensor integrated over `T`:
//!
//! `|v|_{m,p,T}^p = Σ_{|δ|=m} C(m, δ_x) ∫_T |∂^δ v|^p`,
//!
//! so each mixed partial counts once per ordered index tuple. For `p = ∞` the
//! seminorm is the largest `|∂^δ v|` seen on a fixed sample set, a lower
//! estimate of the essential supremum.

pub mod field;
pub mod quadrature;

pub use field::{FieldWithDerivatives, FnField, Scaled, SinSin};
pub use quadrature::{quad_rule, rule_for_degree, QuadratureRule};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Triangle};
use crate::polynomial::{MultiIndex, Poly2};

/// Depth of the sign-change subdivision used for non-even `p`.
pub const MAX_SUBDIVISION_DEPTH: usize = 8;

/// Side of the barycentric lattice sampled for `p = ∞`.
pub const SUP_LATTICE: usize = 32;

fn validate_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "norm index p = {p} must lie in [1, inf]"
        )));
    }
    Ok(())
}

fn is_even_integer(p: f64) -> bool {
    p.is_finite() && p.fract() == 0.0 && (p as u64).is_multiple_of(2)
}

/// One component `∂^δ v` of the derivative tensor with its multiplicity.
struct Component<'a> {
    weight: f64,
    eval: Box<dyn Fn(Point2) -> f64 + 'a>,
    /// Degree of the component when it is a known polynomial.
    degree: Option<usize>,
}

fn components<'a>(f: &'a dyn FieldWithDerivatives, m: usize) -> Vec<Component<'a>> {
    match f.as_poly() {
        Some(poly) => MultiIndex::of_order(m)
            .map(|d| {
                let g = poly.derivative(d);
                let tol = 1e-14 * g.max_abs_coeff();
                let degree = g.effective_degree(tol);
                Component {
                    weight: d.multiplicity(),
                    eval: Box::new(move |x| g.eval(x)),
                    degree: Some(degree),
                }
            })
            .collect(),
        None => MultiIndex::of_order(m)
            .map(|d| Component {
                weight: d.multiplicity(),
                eval: Box::new(move |x| f.derivative(d, x)),
                degree: None,
            })
            .collect(),
    }
}

/// Barycentric lattice `Σ^n` as physical points of `tri`.
pub fn lattice_points(tri: &Triangle, n: usize) -> Vec<Point2> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for a2 in 0..=n {
        for a3 in 0..=n - a2 {
            let a1 = n - a2 - a3;
            out.push(tri.point_at([
                a1 as f64 / n as f64,
                a2 as f64 / n as f64,
                a3 as f64 / n as f64,
            ]));
        }
    }
    out
}

/// `∫_T g⁺` for `g` linear with vertex values `g`.
fn positive_part_linear(area: f64, g: [f64; 3]) -> f64 {
    let mut s = g;
    s.sort_by(|a, b| b.total_cmp(a));
    let [g1, g2, g3] = s;
    if g3 >= 0.0 {
        area * (g1 + g2 + g3) / 3.0
    } else if g1 <= 0.0 {
        0.0
    } else if g2 <= 0.0 {
        area * g1.powi(3) / (3.0 * (g1 - g2) * (g1 - g3))
    } else {
        area * (g1 + g2 + g3) / 3.0 + area * (-g3).powi(3) / (3.0 * (g1 - g3) * (g2 - g3))
    }
}

/// `∫_T |g|` for `g` linear with vertex values `g`.
pub fn abs_integral_linear(area: f64, g: [f64; 3]) -> f64 {
    positive_part_linear(area, g) + positive_part_linear(area, [-g[0], -g[1], -g[2]])
}

fn split(tri: &Triangle) -> [Triangle; 4] {
    let [a, b, c] = *tri.vertices();
    let ab = (a + b) * 0.5;
    let bc = (b + c) * 0.5;
    let ca = (c + a) * 0.5;
    [
        Triangle::new_unchecked([a, ab, ca]),
        Triangle::new_unchecked([ab, b, bc]),
        Triangle::new_unchecked([ca, bc, c]),
        Triangle::new_unchecked([ab, bc, ca]),
    ]
}

/// `∫_T |g|^p` for a single derivative component. Cells whose vertices,
/// edge midpoints and centroid all share a sign are integrated with `rule`;
/// the others are split.
fn abs_power_integral(
    g: &dyn Fn(Point2) -> f64,
    linear: bool,
    p: f64,
    tri: &Triangle,
    rule: &QuadratureRule,
    depth: usize,
) -> f64 {
    let [a, b, c] = *tri.vertices();
    let vals = [g(a), g(b), g(c)];
    if linear && p == 1.0 {
        return abs_integral_linear(tri.area(), vals);
    }
    let probes = [
        g((a + b) * 0.5),
        g((b + c) * 0.5),
        g((c + a) * 0.5),
        g(tri.centroid()),
    ];
    let (lo, hi) = vals
        .iter()
        .chain(probes.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let same_sign = lo >= 0.0 || hi <= 0.0;
    if depth == 0 && !same_sign && p == 1.0 {
        return abs_integral_linear(tri.area(), vals);
    }
    if depth == 0 || same_sign {
        return rule.integrate(tri, |x| g(x).abs().powf(p));
    }
    split(tri)
        .iter()
        .map(|t| abs_power_integral(g, linear, p, t, rule, depth - 1))
        .sum()
}

/// `|f|_{m,p,T}` evaluated with `rule`. `p` may be `f64::INFINITY`.
///
/// Even integer `p` gives a plain quadrature sum. Other finite `p` have
/// kinks where a derivative changes sign; cells showing a sign change are
/// split up to [`MAX_SUBDIVISION_DEPTH`] times, and `p = 1` on linear
/// components is integrated in closed form.
pub fn sobolev_seminorm(
    f: &dyn FieldWithDerivatives,
    m: usize,
    p: f64,
    tri: &Triangle,
    rule: &QuadratureRule,
) -> Result<f64> {
    validate_p(p)?;
    f.require_order(m)?;
    let comps = components(f, m);
    if p.is_infinite() {
        let mut pts: Vec<Point2> = rule.mapped(tri).map(|(x, _)| x).collect();
        pts.extend(lattice_points(tri, SUP_LATTICE));
        let sup = comps
            .iter()
            .flat_map(|c| pts.iter().map(move |x| (c.eval)(*x).abs()))
            .fold(0.0, f64::max);
        return Ok(sup);
    }
    let total: f64 = if is_even_integer(p) {
        let ip = p as i32;
        rule.mapped(tri)
            .map(|(x, w)| w * comps.iter().map(|c| c.weight * (c.eval)(x).powi(ip)).sum::<f64>())
            .sum()
    } else {
        comps
            .iter()
            .map(|c| {
                let linear = matches!(c.degree, Some(d) if d <= 1);
                c.weight * abs_power_integral(&*c.eval, linear, p, tri, rule, MAX_SUBDIVISION_DEPTH)
            })
            .sum()
    };
    Ok(total.max(0.0).powf(1.0 / p))
}

/// Rule used by [`sobolev_seminorm_auto`]: exact for polynomial integrands
/// with even `p`, four extra degrees otherwise, plus the global bump.
pub fn auto_rule(f: &dyn FieldWithDerivatives, m: usize, p: f64) -> &'static QuadratureRule {
    let nominal = match f.as_poly() {
        Some(poly) => {
            let d = poly.degree().saturating_sub(m);
            if is_even_integer(p) {
                d * p as usize
            } else if p.is_finite() {
                d * p.ceil() as usize + 4
            } else {
                d
            }
        }
        None => 12,
    };
    rule_for_degree(nominal)
}

pub fn sobolev_seminorm_auto(
    f: &dyn FieldWithDerivatives,
    m: usize,
    p: f64,
    tri: &Triangle,
) -> Result<f64> {
    sobolev_seminorm(f, m, p, tri, auto_rule(f, m, p))
}

/// `Σ_{|δ|=m} C(m, δ_x) (∂^δ f)²` at a point: the squared Frobenius norm of
/// the order-m derivative tensor.
pub fn derivative_tensor_sq(f: &dyn FieldWithDerivatives, m: usize, pt: Point2) -> f64 {
    MultiIndex::of_order(m)
        .map(|d| d.multiplicity() * f.derivative(d, pt).powi(2))
        .sum()
}

/// Exponents `(τ(p), γ(p))` with `Σ U_i^p ≤ N^τ (Σ U_i²)^{p/2}` and
/// `(Σ U_i²)^{p/2} ≤ N^γ Σ U_i^p` for `N` positive reals.
pub fn tau_gamma(p: f64) -> (f64, f64) {
    debug_assert!((1.0..f64::INFINITY).contains(&p));
    if p <= 2.0 {
        (1.0 - p / 2.0, 0.0)
    } else {
        (0.0, p / 2.0 - 1.0)
    }
}

/// Both sides of the two vector inequalities for `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VectorNormCheck {
    pub sum_p: f64,
    pub l2_pow_p: f64,
    pub upper: f64,
    pub lower: f64,
}

impl VectorNormCheck {
    pub fn new(u: &[f64], p: f64) -> Self {
        let n = u.len() as f64;
        let (tau, gamma) = tau_gamma(p);
        let sum_p: f64 = u.iter().map(|x| x.abs().powf(p)).sum();
        let l2_pow_p = u.iter().map(|x| x * x).sum::<f64>().powf(p / 2.0);
        Self {
            sum_p,
            l2_pow_p,
            upper: n.powf(tau) * l2_pow_p,
            lower: n.powf(gamma) * sum_p,
        }
    }

    /// Both inequalities, with a relative slack of `rel`.
    pub fn holds(&self, rel: f64) -> bool {
        self.sum_p <= self.upper * (1.0 + rel) && self.l2_pow_p <= self.lower * (1.0 + rel)
    }
}

/// Both sides of `|v|_{k,p,Y·T} = Y^{2/p - k} |u|_{k,p,T}` with `v(x) = u(x/Y)`.
pub fn scale_seminorm(
    f: &dyn FieldWithDerivatives,
    tri: &Triangle,
    y: f64,
    k: usize,
    p: f64,
) -> Result<(f64, f64)> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor {y} must be positive")));
    }
    let rule = auto_rule(f, k, p);
    let big = tri.scaled(y)?;
    let pushed = Scaled {
        inner: f,
        factor: y,
    };
    let lhs = sobolev_seminorm(&pushed, k, p, &big, rule)?;
    let exponent = if p.is_infinite() { 0.0 } else { 2.0 / p } - k as f64;
    let rhs = y.powf(exponent) * sobolev_seminorm(f, k, p, tri, rule)?;
    Ok((lhs, rhs))
}

/// `|p|_{m,2,T}` via [`crate::polynomial::seminorm_p2_exact`], re-exported
/// here for symmetry with the quadrature routines.
pub fn seminorm_p2(p: &Poly2, m: usize, tri: &Triangle) -> Result<f64> {
    crate::polynomial::seminorm_p2_exact(p, m, tri)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> Triangle {
        Triangle::unit_right()
    }

    fn x2_minus_x() -> Poly2 {
        Poly2::from_terms(&[(2, 0, 1.0), (1, 0, -1.0)]).unwrap()
    }

    #[test]
    fn seminorm_examples() {
        let x2 = Poly2::monomial(2, 0, 1.0).unwrap();
        assert_relative_eq!(
            sobolev_seminorm_auto(&x2, 2, 2.0, &unit()).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-14
        );
        let e = x2_minus_x();
        assert_relative_eq!(sobolev_seminorm_auto(&e, 1, 1.0, &unit()).unwrap(), 0.25, epsilon = 1e-14);
        assert_relative_eq!(
            sobolev_seminorm_auto(&e, 0, f64::INFINITY, &unit()).unwrap(),
            0.25,
            epsilon = 1e-15
        );
    }

    #[test]
    fn p1_on_quadratic_component_converges() {
        // ∫_T |x² - x - y + 0.1|: a genuinely curved kink
        let g = Poly2::from_terms(&[(2, 0, 1.0), (1, 0, -1.0), (0, 1, -1.0), (0, 0, 0.1)]).unwrap();
        let coarse = sobolev_seminorm(&g, 0, 1.0, &unit(), quad_rule(8).unwrap()).unwrap();
        let fine = sobolev_seminorm(&g, 0, 1.0, &unit(), quad_rule(16).unwrap()).unwrap();
        assert!((coarse - fine).abs() < 1e-7 * fine, "{coarse} vs {fine}");
    }

    #[test]
    fn positive_part_cases() {
        assert_relative_eq!(abs_integral_linear(0.5, [1.0, 1.0, 1.0]), 0.5);
        // g = 2x - 1 on the unit triangle: vertex values (-1, 1, -1)
        let exact = {
            let r = quad_rule(20).unwrap();
            // |2x - 1| is smooth on each half; split the triangle at x = 1/2
            let left = Triangle::new(Point2::new(0.0, 0.0), Point2::new(0.5, 0.0), Point2::new(0.0, 1.0)).unwrap();
            let mid = Triangle::new(Point2::new(0.5, 0.0), Point2::new(0.5, 0.5), Point2::new(0.0, 1.0)).unwrap();
            let right = Triangle::new(Point2::new(0.5, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 0.5)).unwrap();
            [left, mid, right]
                .iter()
                .map(|t| r.integrate(t, |p| (2.0 * p.x - 1.0).abs()))
                .sum::<f64>()
        };
        assert_relative_eq!(abs_integral_linear(0.5, [-1.0, 1.0, -1.0]), exact, epsilon = 1e-15);
        assert_relative_eq!(exact, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn tau_gamma_examples() {
        assert_eq!(tau_gamma(1.0), (0.5, 0.0));
        assert_eq!(tau_gamma(2.0), (0.0, 0.0));
        assert_eq!(tau_gamma(4.0), (0.0, 1.0));
    }

    #[test]
    fn scaling_examples() {
        let x2 = Poly2::monomial(2, 0, 1.0).unwrap();
        let (lhs, rhs) = scale_seminorm(&x2, &unit(), 1.0, 2, 2.0).unwrap();
        assert_eq!(lhs, rhs);
        let (lhs, rhs) = scale_seminorm(&x2, &unit(), 2.0, 2, 2.0).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        assert_relative_eq!(rhs, 0.5 * 2f64.sqrt(), max_relative = 1e-13);
        let (lhs, rhs) = scale_seminorm(&x2, &unit(), 3.0, 0, 1.0).unwrap();
        let base = sobolev_seminorm_auto(&x2, 0, 1.0, &unit()).unwrap();
        assert_relative_eq!(rhs, 9.0 * base, max_relative = 1e-13);
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn invalid_p_is_rejected() {
        let x2 = Poly2::monomial(2, 0, 1.0).unwrap();
        assert!(sobolev_seminorm_auto(&x2, 0, 0.5, &unit()).is_err());
    }
}
