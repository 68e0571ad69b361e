//! Lagrange interpolation of order `k` on the uniform barycentric lattice.
//!
//! The basis is built once per order on the reference triangle
//! `(0,0), (1,0), (0,1)`. Interpolants on a physical triangle are formed in
//! reference coordinates `(ξ, η) = (λ2, λ3)` and then rewritten in `(x, y)`
//! by substituting the affine barycentric coordinates. This keeps the
//! basis independent of the triangle's shape.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{Affine2, Point2, Triangle};
use crate::norms::FieldWithDerivatives;
use crate::polynomial::{coeff_count, MultiIndex, Poly2, MAX_DEGREE};

pub const MAX_ORDER: usize = 5;

pub fn validate_order(k: usize) -> Result<()> {
    if !(1..=MAX_ORDER).contains(&k) {
        return Err(Error::OrderOutOfRange {
            order: k,
            min: 1,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// `Σ^k(T)` with barycentric labels `(a1, a2, a3)`, `a1 + a2 + a3 = k`.
#[derive(Debug, Clone)]
pub struct NodeSet {
    pub k: usize,
    pub nodes: Vec<Point2>,
    pub labels: Vec<[usize; 3]>,
}

impl NodeSet {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn labels(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(coeff_count(k));
    for a2 in 0..=k {
        for a3 in 0..=k - a2 {
            out.push([k - a2 - a3, a2, a3]);
        }
    }
    out
}

pub fn nodes(k: usize, tri: &Triangle) -> Result<NodeSet> {
    validate_order(k)?;
    let labels = labels(k);
    let kf = k as f64;
    let nodes = labels
        .iter()
        .map(|a| tri.point_at([a[0] as f64 / kf, a[1] as f64 / kf, a[2] as f64 / kf]))
        .collect();
    Ok(NodeSet { k, nodes, labels })
}

/// Reference basis coefficients, indexed by `k - 1`. Column `n` holds the
/// monomial coefficients of the basis function for node `n`, built from the
/// product formula `Π_i Π_{j<a_i} (k λ_i - j) / (j + 1)`.
fn reference_inverses() -> &'static [DMatrix<f64>] {
    static CACHE: OnceLock<Vec<DMatrix<f64>>> = OnceLock::new();
    CACHE.get_or_init(|| {
        (1..=MAX_ORDER)
            .map(|k| {
                let n = coeff_count(k);
                let kf = k as f64;
                // λ1 = 1 - ξ - η, λ2 = ξ, λ3 = η as degree-1 polynomials
                let lambda = [
                    Poly2::from_terms(&[(0, 0, 1.0), (1, 0, -1.0), (0, 1, -1.0)]),
                    Poly2::from_terms(&[(1, 0, 1.0)]),
                    Poly2::from_terms(&[(0, 1, 1.0)]),
                ]
                .map(|p| p.expect("linear polynomial"));
                let mut inv = DMatrix::zeros(n, n);
                for (col, a) in labels(k).iter().enumerate() {
                    let mut phi = Poly2::constant(1.0);
                    for (l, &ai) in lambda.iter().zip(a) {
                        for j in 0..ai {
                            let factor = &(l * (kf / (j as f64 + 1.0))) - &Poly2::constant(j as f64 / (j as f64 + 1.0));
                            phi = phi.try_mul(&factor).expect("degree within cap");
                        }
                    }
                    for (row, c) in phi.coeffs().iter().enumerate() {
                        inv[(row, col)] = *c;
                    }
                }
                inv
            })
            .collect()
    })
}

/// Affine map `(x, y) ↦ (λ2, λ3)` taking `tri` to the reference triangle.
fn to_reference(tri: &Triangle) -> Affine2 {
    let c = tri.barycentric_coefficients();
    Affine2 {
        m: nalgebra::Matrix2::new(c[1][0], c[1][1], c[2][0], c[2][1]),
        t: nalgebra::Vector2::new(c[1][2], c[2][2]),
    }
}

fn reference_interpolant(values: &[f64], k: usize) -> Poly2 {
    let inv = &reference_inverses()[k - 1];
    let coeffs = inv * DVector::from_column_slice(values);
    Poly2::from_coeffs(k, coeffs.as_slice().to_vec()).expect("k within cap")
}

/// Lagrange basis functions of `Σ^k(T)`.
///
/// `basis` holds the Cartesian polynomials. On thin triangles their
/// coefficients grow like `area^{-k}`, so [`LagrangeBasis::eval_all`]
/// evaluates through the reference coordinates instead.
#[derive(Debug, Clone)]
pub struct LagrangeBasis {
    pub k: usize,
    pub basis: Vec<Poly2>,
    reference: Vec<Poly2>,
    map: Affine2,
}

impl LagrangeBasis {
    pub fn eval_all(&self, pt: Point2) -> Vec<f64> {
        let r = self.map.apply(pt);
        self.reference.iter().map(|b| b.eval(r)).collect()
    }
}

pub fn basis(k: usize, tri: &Triangle) -> Result<LagrangeBasis> {
    validate_order(k)?;
    let n = coeff_count(k);
    let map = to_reference(tri);
    let reference: Vec<Poly2> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            reference_interpolant(&e, k)
        })
        .collect();
    let basis = reference.iter().map(|r| r.compose_affine(&map)).collect();
    Ok(LagrangeBasis {
        k,
        basis,
        reference,
        map,
    })
}

/// `I_T^k` applied to node values given in [`nodes`] order.
pub fn interpolate(values: &[f64], k: usize, tri: &Triangle) -> Result<Poly2> {
    validate_order(k)?;
    if values.len() != coeff_count(k) {
        return Err(Error::LengthMismatch {
            expected: coeff_count(k),
            got: values.len(),
        });
    }
    Ok(reference_interpolant(values, k).compose_affine(&to_reference(tri)))
}

pub fn interpolate_field(f: &dyn FieldWithDerivatives, k: usize, tri: &Triangle) -> Result<Poly2> {
    let ns = nodes(k, tri)?;
    let values: Vec<f64> = ns.nodes.iter().map(|&x| f.value(x)).collect();
    interpolate(&values, k, tri)
}

/// `p - I_T^k p` for a polynomial of any degree up to the storage cap.
pub fn interpolation_residual(p: &Poly2, k: usize, tri: &Triangle) -> Result<Poly2> {
    let ip = interpolate_field(p, k, tri)?;
    Ok(p - &ip)
}

/// `p - I_T^k p` for `p` of degree at most `k + 1`.
pub fn error_poly(p: &Poly2, k: usize, tri: &Triangle) -> Result<Poly2> {
    validate_order(k)?;
    let d = p.effective_degree(0.0);
    if d > k + 1 {
        return Err(Error::DegreeTooHigh {
            degree: d,
            cap: k + 1,
        });
    }
    interpolation_residual(p, k, tri)
}

/// `v - I_T^k v` for a general field. Vanishes at every node of `Σ^k(T)`.
pub struct ErrorField<'a> {
    pub field: &'a dyn FieldWithDerivatives,
    pub interpolant: Poly2,
    name: String,
}

impl<'a> ErrorField<'a> {
    pub fn new(field: &'a dyn FieldWithDerivatives, k: usize, tri: &Triangle) -> Result<Self> {
        let interpolant = interpolate_field(field, k, tri)?;
        Ok(Self {
            name: format!("{} - I^{k}", field.name()),
            field,
            interpolant,
        })
    }
}

impl FieldWithDerivatives for ErrorField<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn max_order(&self) -> usize {
        self.field.max_order()
    }

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64 {
        self.field.derivative(delta, pt) - self.interpolant.eval_diff(delta, pt)
    }

    fn as_poly(&self) -> Option<Poly2> {
        let p = self.field.as_poly()?;
        if p.degree().max(self.interpolant.degree()) > MAX_DEGREE {
            return None;
        }
        Some(&p - &self.interpolant)
    }
}
