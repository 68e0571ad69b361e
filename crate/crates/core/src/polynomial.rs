//! Dense bivariate polynomials in the monomial basis, with exact
//! differentiation and exact integration over triangles.
//!
//! Coefficients are stored in graded-lexicographic order: degree 0, then
//! `x, y`, then `x², xy, y²`, and so on. A polynomial of degree `d` always
//! stores `(d+1)(d+2)/2` coefficients.
//!
//! Integrals over a triangle are evaluated by writing `x` and `y` as linear
//! combinations of the barycentric coordinates and applying
//! `∫_K λ1^a λ2^b λ3^c = 2|K| a! b! c! / (a+b+c+2)!`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::geometry::{Affine2, Point2, Triangle};

/// Highest degree a [`Poly2`] may carry.
pub const MAX_DEGREE: usize = 12;

/// Largest total exponent accepted by [`integrate_monomial`].
pub const MAX_EXPONENT_SUM: usize = 60;

/// Partial derivative `∂x^dx ∂y^dy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    pub dx: usize,
    pub dy: usize,
}

impl MultiIndex {
    pub const fn new(dx: usize, dy: usize) -> Self {
        Self { dx, dy }
    }

    pub const fn order(&self) -> usize {
        self.dx + self.dy
    }

    /// All multi-indices of order `m`, `(m,0)` first.
    pub fn of_order(m: usize) -> impl Iterator<Item = MultiIndex> {
        (0..=m).map(move |j| MultiIndex::new(m - j, j))
    }

    /// Number of ordered index tuples `(i1, …, im)` that give this partial
    /// derivative, i.e. `C(m, dx)`.
    pub fn multiplicity(&self) -> f64 {
        binomial(self.order() as u32, self.dx as u32) as f64
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `n (n-1) … (n-k+1)`
fn falling(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

/// Position of the monomial `x^i y^j` in graded-lexicographic storage.
pub const fn monomial_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

pub const fn coeff_count(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// Exponents `(i, j)` in storage order up to `degree`.
pub fn monomials(degree: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=degree).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Poly2 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn zeros(degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeTooHigh {
                degree,
                cap: MAX_DEGREE,
            });
        }
        Ok(Self {
            degree,
            coeffs: vec![0.0; coeff_count(degree)],
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// `c · x^i y^j`
    pub fn monomial(i: usize, j: usize, c: f64) -> Result<Self> {
        let mut p = Self::zeros(i + j)?;
        p.coeffs[monomial_index(i, j)] = c;
        Ok(p)
    }

    /// Sum of terms `c · x^i y^j`.
    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Result<Self> {
        let degree = terms.iter().map(|&(i, j, _)| i + j).max().unwrap_or(0);
        let mut p = Self::zeros(degree)?;
        for &(i, j, c) in terms {
            p.coeffs[monomial_index(i, j)] += c;
        }
        Ok(p)
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != coeff_count(degree) {
            return Err(Error::LengthMismatch {
                expected: coeff_count(degree),
                got: coeffs.len(),
            });
        }
        let mut p = Self::zeros(degree)?;
        p.coeffs = coeffs;
        Ok(p)
    }

    /// Storage degree (an upper bound on the true degree).
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[monomial_index(i, j)]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        monomials(self.degree)
            .zip(self.coeffs.iter())
            .map(|((i, j), &c)| (i, j, c))
    }

    /// Largest degree with a coefficient above `tol` in magnitude.
    pub fn effective_degree(&self, tol: f64) -> usize {
        self.terms()
            .filter(|t| t.2.abs() > tol)
            .map(|(i, j, _)| i + j)
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn widened(&self, degree: usize) -> Self {
        let mut out = Self {
            degree,
            coeffs: vec![0.0; coeff_count(degree)],
        };
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        out
    }

    pub fn eval(&self, pt: Point2) -> f64 {
        self.eval_diff(MultiIndex::new(0, 0), pt)
    }

    /// Exact value of `∂^δ p` at `pt`.
    pub fn eval_diff(&self, delta: MultiIndex, pt: Point2) -> f64 {
        if delta.order() > self.degree {
            return 0.0;
        }
        let n = self.degree;
        let mut xp = [1.0; MAX_DEGREE + 1];
        let mut yp = [1.0; MAX_DEGREE + 1];
        for e in 1..=n {
            xp[e] = xp[e - 1] * pt.x;
            yp[e] = yp[e - 1] * pt.y;
        }
        let mut acc = 0.0;
        for (i, j, c) in self.terms() {
            if c == 0.0 || i < delta.dx || j < delta.dy {
                continue;
            }
            acc += c
                * falling(i, delta.dx)
                * falling(j, delta.dy)
                * xp[i - delta.dx]
                * yp[j - delta.dy];
        }
        acc
    }

    pub fn derivative(&self, delta: MultiIndex) -> Self {
        let degree = self.degree.saturating_sub(delta.order());
        let mut out = Self {
            degree,
            coeffs: vec![0.0; coeff_count(degree)],
        };
        if delta.order() > self.degree {
            return out;
        }
        for (i, j, c) in self.terms() {
            if i >= delta.dx && j >= delta.dy {
                out.coeffs[monomial_index(i - delta.dx, j - delta.dy)] +=
                    c * falling(i, delta.dx) * falling(j, delta.dy);
            }
        }
        out
    }

    pub fn scale(&self, f: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * f).collect(),
        }
    }

    /// `self += f · other`
    pub fn add_scaled(&mut self, other: &Poly2, f: f64) {
        if other.degree > self.degree {
            *self = self.widened(other.degree);
        }
        for (a, b) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *a += f * b;
        }
    }

    pub fn try_mul(&self, other: &Poly2) -> Result<Self> {
        let mut out = Self::zeros(self.degree + other.degree)?;
        for (i, j, a) in self.terms() {
            if a == 0.0 {
                continue;
            }
            for (k, l, b) in other.terms() {
                out.coeffs[monomial_index(i + k, j + l)] += a * b;
            }
        }
        Ok(out)
    }

    /// `q(x) = p(M x + t)`.
    pub fn compose_affine(&self, map: &Affine2) -> Self {
        let u = Poly2::from_terms(&[(0, 0, map.t.x), (1, 0, map.m[(0, 0)]), (0, 1, map.m[(0, 1)])])
            .expect("degree 1");
        let v = Poly2::from_terms(&[(0, 0, map.t.y), (1, 0, map.m[(1, 0)]), (0, 1, map.m[(1, 1)])])
            .expect("degree 1");
        let n = self.degree;
        let mut upow = vec![Poly2::constant(1.0)];
        let mut vpow = vec![Poly2::constant(1.0)];
        for e in 1..=n {
            upow.push(upow[e - 1].try_mul(&u).expect("degree within cap"));
            vpow.push(vpow[e - 1].try_mul(&v).expect("degree within cap"));
        }
        let mut out = Poly2::zeros(n).expect("degree within cap");
        for (i, j, c) in self.terms() {
            if c != 0.0 {
                out.add_scaled(&upow[i].try_mul(&vpow[j]).expect("degree within cap"), c);
            }
        }
        out
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out.add_scaled(rhs, 1.0);
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out.add_scaled(rhs, -1.0);
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: f64) -> Poly2 {
        self.scale(rhs)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            if first {
                write!(f, "{c}")?;
            } else if c < 0.0 {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "·x")?,
                _ => write!(f, "·x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "·y")?,
                _ => write!(f, "·y^{j}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `a! b! c! · (n+1)(n+2) / ... ` reduced to `2 / (multinomial(n; a,b,c) (n+1)(n+2))`,
/// computed exactly in integer arithmetic and rounded once.
fn barycentric_weight(a: usize, b: usize, c: usize) -> Result<f64> {
    let n = a + b + c;
    if n > MAX_EXPONENT_SUM {
        return Err(Error::ExponentOverflow {
            sum: n,
            max: MAX_EXPONENT_SUM,
        });
    }
    let multinomial = binomial(n as u32, a as u32) * binomial((n - a) as u32, b as u32);
    let denom = multinomial * ((n + 1) * (n + 2)) as u128;
    Ok(2.0 / denom as f64)
}

/// `∫_T λ1^a λ2^b λ3^c`.
pub fn integrate_monomial(tri: &Triangle, a: usize, b: usize, c: usize) -> Result<f64> {
    Ok(tri.area() * barycentric_weight(a, b, c)?)
}

/// Cartesian moments `∫_T x^i y^j` for all `i + j ≤ degree`, in
/// graded-lexicographic order.
#[derive(Debug, Clone)]
pub struct MomentTable {
    degree: usize,
    values: Vec<f64>,
}

impl MomentTable {
    pub fn new(tri: &Triangle, degree: usize) -> Result<Self> {
        if degree > MAX_EXPONENT_SUM {
            return Err(Error::ExponentOverflow {
                sum: degree,
                max: MAX_EXPONENT_SUM,
            });
        }
        let v = tri.vertices();
        let area = tri.area();
        // homogeneous trivariate polynomials in (λ1, λ2, λ3), stored as
        // table[a][b] with c = n - a - b
        let times = |h: &Vec<Vec<f64>>, w: [f64; 3]| -> Vec<Vec<f64>> {
            let n = h.len() - 1;
            let mut out = vec![vec![0.0; n + 2]; n + 2];
            for a in 0..=n {
                for b in 0..=n - a {
                    let c = h[a][b];
                    if c == 0.0 {
                        continue;
                    }
                    out[a + 1][b] += c * w[0];
                    out[a][b + 1] += c * w[1];
                    out[a][b] += c * w[2];
                }
            }
            out
        };
        let integrate = |h: &Vec<Vec<f64>>| -> Result<f64> {
            let n = h.len() - 1;
            let mut acc = 0.0;
            for (a, row) in h.iter().enumerate() {
                for (b, &c) in row.iter().enumerate().take(n - a + 1) {
                    if c != 0.0 {
                        acc += c * barycentric_weight(a, b, n - a - b)?;
                    }
                }
            }
            Ok(acc * area)
        };
        let xs = [v[0].x, v[1].x, v[2].x];
        let ys = [v[0].y, v[1].y, v[2].y];
        let mut values = vec![0.0; coeff_count(degree)];
        // expansions of x^i for the current row, then multiply by y^j
        let mut xpow = vec![vec![1.0]];
        for i in 0..=degree {
            let mut cur = xpow.clone();
            for j in 0..=degree - i {
                values[monomial_index(i, j)] = integrate(&cur)?;
                if i + j < degree {
                    cur = times(&cur, ys);
                }
            }
            if i < degree {
                xpow = times(&xpow, xs);
            }
        }
        Ok(Self { degree, values })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[monomial_index(i, j)]
    }

    /// `∫_T p`
    pub fn integrate(&self, p: &Poly2) -> f64 {
        assert!(p.degree() <= self.degree, "moment table too small");
        p.terms().map(|(i, j, c)| c * self.get(i, j)).sum()
    }

    /// `∫_T p q` without forming the product polynomial.
    pub fn inner(&self, p: &Poly2, q: &Poly2) -> f64 {
        assert!(p.degree() + q.degree() <= self.degree, "moment table too small");
        let mut acc = 0.0;
        for (i, j, a) in p.terms() {
            if a == 0.0 {
                continue;
            }
            for (k, l, b) in q.terms() {
                acc += a * b * self.get(i + k, j + l);
            }
        }
        acc
    }

    /// `Σ_{|δ|=m} C(m, δ) ∫_T ∂^δ p ∂^δ q`, the bilinear form of the order-m
    /// seminorm.
    pub fn seminorm_inner(&self, p: &Poly2, q: &Poly2, m: usize) -> f64 {
        MultiIndex::of_order(m)
            .map(|d| d.multiplicity() * self.inner(&p.derivative(d), &q.derivative(d)))
            .sum()
    }
}

/// Exact `|p|_{m,2,T}`.
///
/// Seminorms sum over the entries of the order-m derivative tensor, so the
/// mixed partial `∂^δ` is counted `C(m, δ_x)` times. This keeps them
/// invariant under rotations.
pub fn seminorm_p2_exact(p: &Poly2, m: usize, tri: &Triangle) -> Result<f64> {
    if m > p.degree() {
        return Ok(0.0);
    }
    let table = MomentTable::new(tri, 2 * (p.degree() - m))?;
    Ok(table.seminorm_inner(p, p, m).max(0.0).sqrt())
}
