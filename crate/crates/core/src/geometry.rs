//! Triangle geometry: metrics, reduction to standard position, and the
//! 2×2 matrix / Kronecker-power calculus used to transport derivative norms
//! between a triangle and its right-angled reference.
//!
//! A triangle in standard position has vertices `(0,0)`, `(1,0)` and
//! `(αs, αt)` with `s = cos θ`, `t = sin θ`, `0 < α ≤ 1` and `s ≤ α/2`, so the
//! edge from `(1,0)` to `(αs, αt)` is the longest one. The linear map
//! `A = [[1, s], [0, t]]` carries the right triangle `K_α` with vertices
//! `(0,0)`, `(1,0)`, `(0,α)` onto it.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Matrix2, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};

/// Triangles with area below this are rejected. Nothing else is: thin and
/// flat triangles are exactly what the estimates are about.
pub const MIN_AREA: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, rhs: f64) -> Point2 {
        Point2::new(self.x * rhs, self.y * rhs)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Affine map `x ↦ M x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine2 {
    pub m: Matrix2<f64>,
    pub t: Vector2<f64>,
}

impl Affine2 {
    pub fn identity() -> Self {
        Self {
            m: Matrix2::identity(),
            t: Vector2::zeros(),
        }
    }

    pub fn linear(m: Matrix2<f64>) -> Self {
        Self {
            m,
            t: Vector2::zeros(),
        }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let v = self.m * Vector2::new(p.x, p.y) + self.t;
        Point2::new(v.x, v.y)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.m.try_inverse().map(|mi| Self {
            m: mi,
            t: -(mi * self.t),
        })
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            m: self.m * other.m,
            t: self.m * other.t + self.t,
        }
    }
}

/// A non-degenerate triangle with counterclockwise vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Triangle {
    v: [Point2; 3],
}

fn signed_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

impl Triangle {
    /// Builds a triangle, swapping the last two vertices if they are given
    /// clockwise. Fails on non-finite input or zero area.
    pub fn new(v1: Point2, v2: Point2, v3: Point2) -> Result<Self> {
        if !(v1.is_finite() && v2.is_finite() && v3.is_finite()) {
            return Err(Error::NonFinite);
        }
        let area = signed_area(v1, v2, v3);
        let v = if area < 0.0 { [v1, v3, v2] } else { [v1, v2, v3] };
        if area.abs() < MIN_AREA {
            return Err(Error::DegenerateTriangle { area });
        }
        Ok(Self { v })
    }

    /// Skips validation; the caller guarantees counterclockwise order and
    /// positive area.
    pub(crate) fn new_unchecked(v: [Point2; 3]) -> Self {
        Self { v }
    }

    /// `[x1, y1, x2, y2, x3, y3]`
    pub fn from_coords(c: [f64; 6]) -> Result<Self> {
        Self::new(
            Point2::new(c[0], c[1]),
            Point2::new(c[2], c[3]),
            Point2::new(c[4], c[5]),
        )
    }

    /// The reference right triangle `(0,0), (1,0), (0,1)`.
    pub fn unit_right() -> Self {
        Self {
            v: [
                Point2::new(0.0, 0.0),
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
            ],
        }
    }

    /// Squeezed right triangle `(0,0), (1,0), (0,α)`.
    pub fn squeezed(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "squeeze parameter {alpha} not in (0, 1]"
            )));
        }
        Self::new(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, alpha),
        )
    }

    /// Equilateral triangle with one horizontal edge starting at the origin.
    pub fn equilateral(side: f64) -> Result<Self> {
        Self::new(
            Point2::new(0.0, 0.0),
            Point2::new(side, 0.0),
            Point2::new(0.5 * side, 0.5 * 3f64.sqrt() * side),
        )
    }

    pub fn vertices(&self) -> &[Point2; 3] {
        &self.v
    }

    pub fn vertex(&self, i: usize) -> Point2 {
        self.v[i]
    }

    pub fn area(&self) -> f64 {
        signed_area(self.v[0], self.v[1], self.v[2])
    }

    pub fn centroid(&self) -> Point2 {
        (self.v[0] + self.v[1] + self.v[2]) * (1.0 / 3.0)
    }

    pub fn point_at(&self, bary: [f64; 3]) -> Point2 {
        self.v[0] * bary[0] + self.v[1] * bary[1] + self.v[2] * bary[2]
    }

    /// Image under an affine map. Orientation-reversing maps are fixed up by
    /// [`Triangle::new`].
    pub fn mapped(&self, map: &Affine2) -> Result<Self> {
        Self::new(
            map.apply(self.v[0]),
            map.apply(self.v[1]),
            map.apply(self.v[2]),
        )
    }

    /// `G_Y(K) = Y·K`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.v[0] * factor, self.v[1] * factor, self.v[2] * factor)
    }

    /// Coefficients `(a_i, b_i, c_i)` with `λ_i(x, y) = a_i x + b_i y + c_i`.
    pub fn barycentric_coefficients(&self) -> [[f64; 3]; 3] {
        let two_s = 2.0 * self.area();
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            let p = self.v[(i + 1) % 3];
            let q = self.v[(i + 2) % 3];
            row[0] = (p.y - q.y) / two_s;
            row[1] = (q.x - p.x) / two_s;
            row[2] = p.cross(q) / two_s;
        }
        out
    }

    /// Length of the edge opposite vertex `i`.
    pub fn edge_lengths(&self) -> [f64; 3] {
        [
            (self.v[2] - self.v[1]).norm(),
            (self.v[0] - self.v[2]).norm(),
            (self.v[1] - self.v[0]).norm(),
        ]
    }

    /// Interior angle at vertex `i`.
    pub fn angles(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, a) in out.iter_mut().enumerate() {
            let u = self.v[(i + 1) % 3] - self.v[i];
            let w = self.v[(i + 2) % 3] - self.v[i];
            *a = u.cross(w).abs().atan2(u.dot(w));
        }
        out
    }

    pub fn circumradius(&self) -> f64 {
        let e = self.edge_lengths();
        e[0] * e[1] * e[2] / (4.0 * self.area())
    }

    pub fn metrics(&self) -> TriangleMetrics {
        metrics(self)
    }

    pub fn standard_form(&self) -> StandardForm {
        standard_form(self)
    }
}

/// Size and shape measures of a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleMetrics {
    pub h1: f64,
    pub h2: f64,
    /// Longest edge.
    pub h_k: f64,
    pub area: f64,
    pub circumradius: f64,
    /// Diameter of the inscribed circle.
    pub rho: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// `h_K / ρ_K`
    pub chunkiness: f64,
    /// `R_K / h_K`
    pub semiregularity: f64,
}

impl TriangleMetrics {
    pub const CSV_HEADER: [&'static str; 10] = [
        "h1",
        "h2",
        "hK",
        "S",
        "R",
        "rho",
        "theta_min",
        "theta_max",
        "chunkiness",
        "semiregularity",
    ];

    pub fn csv_values(&self) -> [f64; 10] {
        [
            self.h1,
            self.h2,
            self.h_k,
            self.area,
            self.circumradius,
            self.rho,
            self.theta_min,
            self.theta_max,
            self.chunkiness,
            self.semiregularity,
        ]
    }
}

pub fn metrics(tri: &Triangle) -> TriangleMetrics {
    let mut e = tri.edge_lengths();
    e.sort_by(f64::total_cmp);
    let [h1, h2, h_k] = e;
    let area = tri.area();
    let angles = tri.angles();
    let theta_min = angles.iter().copied().fold(f64::INFINITY, f64::min);
    let theta_max = angles.iter().copied().fold(0.0, f64::max);
    let circumradius = h1 * h2 * h_k / (4.0 * area);
    let rho = 4.0 * area / (h1 + h2 + h_k);
    TriangleMetrics {
        h1,
        h2,
        h_k,
        area,
        circumradius,
        rho,
        theta_min,
        theta_max,
        chunkiness: h_k / rho,
        semiregularity: circumradius / h_k,
    }
}

/// A triangle reduced to standard position, together with the similarity
/// that performs the reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardForm {
    /// `h1 / h2`
    pub alpha: f64,
    /// `cos θ`, θ the angle at the vertex shared by the two shorter edges.
    pub s: f64,
    /// `sin θ > 0`
    pub t: f64,
    /// Maps the input triangle onto the standard one; `map(order[i])` is the
    /// i-th standard vertex.
    pub map: Affine2,
    /// Indices of the input vertices landing on `(0,0)`, `(1,0)`, `(αs,αt)`.
    pub order: [usize; 3],
    /// Second-longest edge of the input triangle (the scale factor removed).
    pub h2: f64,
}

impl StandardForm {
    /// Standard form given directly by its parameters; the map is the identity.
    pub fn new(alpha: f64, s: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidStandardForm(format!(
                "alpha = {alpha} not in (0, 1]"
            )));
        }
        if !(s > -1.0 && s <= 0.5 * alpha + 1e-15) {
            return Err(Error::InvalidStandardForm(format!(
                "s = {s} not in (-1, alpha/2]"
            )));
        }
        Ok(Self {
            alpha,
            s,
            t: (1.0 - s * s).sqrt(),
            map: Affine2::identity(),
            order: [0, 1, 2],
            h2: 1.0,
        })
    }

    pub fn from_angle(alpha: f64, theta: f64) -> Result<Self> {
        let mut sf = Self::new(alpha, theta.cos())?;
        sf.t = theta.sin();
        if sf.t <= 0.0 {
            return Err(Error::InvalidStandardForm(format!(
                "theta = {theta} gives sin θ <= 0"
            )));
        }
        Ok(sf)
    }

    pub fn theta(&self) -> f64 {
        self.t.atan2(self.s)
    }

    pub fn vertices(&self) -> [Point2; 3] {
        [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(self.alpha * self.s, self.alpha * self.t),
        ]
    }

    pub fn triangle(&self) -> Result<Triangle> {
        let [a, b, c] = self.vertices();
        Triangle::new(a, b, c)
    }

    /// `|e2|`, the edge from `(1,0)` to `(αs, αt)`.
    pub fn longest_edge(&self) -> f64 {
        (1.0 + self.alpha * self.alpha - 2.0 * self.alpha * self.s)
            .max(0.0)
            .sqrt()
    }

    /// Circumradius of the standardized triangle, `|e2| / (2t)` by the sine law.
    pub fn circumradius(&self) -> f64 {
        self.longest_edge() / (2.0 * self.t)
    }
}

/// Reduces `tri` to standard position by a translation, a rotation, an
/// optional reflection and the scaling `1/h2`.
///
/// Edges are ranked by `(length, lower endpoint index, higher endpoint index)`
/// so equal lengths resolve deterministically.
pub fn standard_form(tri: &Triangle) -> StandardForm {
    let v = tri.vertices();
    let mut edges = [(0usize, 1usize), (0, 2), (1, 2)].map(|(i, j)| ((v[j] - v[i]).norm(), i, j));
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let (_, a1, b1) = edges[0];
    let (_, a2, b2) = edges[1];
    let x1 = if a1 == a2 || a1 == b2 { a1 } else { b1 };
    let x2 = if a2 == x1 { b2 } else { a2 };
    let x3 = if a1 == x1 { b1 } else { a1 };

    let u = v[x2] - v[x1];
    let w = v[x3] - v[x1];
    let h2 = u.norm();
    let h1 = w.norm();
    let cross = u.cross(w);
    let (c, sn) = (u.dot(w), cross.abs());
    let r = c.hypot(sn);

    let rot = Matrix2::new(u.x, u.y, -u.y, u.x) / h2;
    let flip = if cross < 0.0 {
        Matrix2::new(1.0, 0.0, 0.0, -1.0)
    } else {
        Matrix2::identity()
    };
    let m = flip * rot / h2;
    let origin = Vector2::new(v[x1].x, v[x1].y);
    StandardForm {
        alpha: h1 / h2,
        s: c / r,
        t: sn / r,
        map: Affine2 { m, t: -(m * origin) },
        order: [x1, x2, x3],
        h2,
    }
}

/// Minimum and maximum eigenvalue of a symmetric positive definite matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    pub mu_min: f64,
    pub mu_max: f64,
}

impl EigenPair {
    /// Extreme eigenvalues of the k-fold Kronecker power.
    pub fn pow(&self, k: u32) -> EigenPair {
        EigenPair {
            mu_min: self.mu_min.powi(k as i32),
            mu_max: self.mu_max.powi(k as i32),
        }
    }

    pub fn recip(&self) -> EigenPair {
        EigenPair {
            mu_min: 1.0 / self.mu_max,
            mu_max: 1.0 / self.mu_min,
        }
    }
}

fn sym2_eigen_with_det(m: &Matrix2<f64>, det: f64) -> EigenPair {
    let a = m[(0, 0)];
    let d = m[(1, 1)];
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    let mu_max = 0.5 * (a + d) + (0.5 * (a - d)).hypot(b);
    // det / mu_max avoids cancellation in the small eigenvalue
    let mu_min = if mu_max > 0.0 {
        det / mu_max
    } else {
        0.5 * (a + d) - (0.5 * (a - d)).hypot(b)
    };
    EigenPair { mu_min, mu_max }
}

/// Closed-form eigenvalues of a symmetric 2×2 matrix from trace and determinant.
pub fn sym2_eigen(m: &Matrix2<f64>) -> EigenPair {
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    sym2_eigen_with_det(m, m[(0, 0)] * m[(1, 1)] - b * b)
}

/// The folding matrix `A`, its inverse `B`, and the extreme eigenvalues of
/// `AᵀA` and `BBᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixPair {
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
    pub eig_ata: EigenPair,
    pub eig_bbt: EigenPair,
}

pub fn matrix_pair(sf: &StandardForm) -> Result<MatrixPair> {
    let (s, t) = (sf.s, sf.t);
    if t.is_nan() || t <= 0.0 || !s.is_finite() {
        return Err(Error::InvalidStandardForm(format!("t = {t} must be positive")));
    }
    let a = Matrix2::new(1.0, s, 0.0, t);
    let b = Matrix2::new(1.0, -s / t, 0.0, 1.0 / t);
    // det(AᵀA) = t², det(BBᵀ) = 1/t²
    let eig_ata = sym2_eigen_with_det(&(a.transpose() * a), t * t);
    let eig_bbt = sym2_eigen_with_det(&(b * b.transpose()), 1.0 / (t * t));
    Ok(MatrixPair {
        a,
        b,
        eig_ata,
        eig_bbt,
    })
}

/// `M ⊗ M ⊗ … ⊗ M` (k factors), a `2^k × 2^k` matrix.
pub fn kron_power(m: &Matrix2<f64>, k: usize) -> Result<DMatrix<f64>> {
    if k == 0 {
        return Err(Error::OrderOutOfRange {
            order: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let base = DMatrix::from_column_slice(2, 2, m.as_slice());
    let mut out = base.clone();
    for _ in 1..k {
        out = out.kronecker(&base);
    }
    Ok(out)
}

/// All `2^k` eigenvalues of the k-fold Kronecker power of a 2×2 symmetric
/// matrix with eigenvalues `eig`, as products in Kronecker order.
pub fn kron_eigenvalues(eig: [f64; 2], k: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    for _ in 0..k {
        out = out
            .iter()
            .flat_map(|&p| eig.iter().map(move |&e| p * e))
            .collect();
    }
    out
}

/// Both sides of `1/√(1−|s|) ≤ 2√2 R` for a standard-position triangle with
/// circumradius `r`.
pub fn standard_radius_gap(sf: &StandardForm, r: f64) -> Result<(f64, f64)> {
    let gap = 1.0 - sf.s.abs();
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::InvalidStandardForm(format!(
            "|s| = {} leaves a degenerate triangle",
            sf.s.abs()
        )));
    }
    Ok((1.0 / gap.sqrt(), 2.0 * SQRT_2 * r))
}

/// `R/h_K` expressed through the maximum angle.
pub fn semiregularity_from_angle(theta_max: f64) -> f64 {
    debug_assert!(theta_max >= PI / 3.0 - 1e-12);
    1.0 / (2.0 * theta_max.sin())
}
