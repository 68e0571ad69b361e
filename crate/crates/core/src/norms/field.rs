//! Scalar fields that can report their partial derivatives.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::polynomial::{MultiIndex, Poly2};

/// A function bundle `v` supplying `∂^δ v` for `|δ| ≤ max_order()`.
pub trait FieldWithDerivatives: Sync {
    fn name(&self) -> &str;

    /// Highest derivative order available.
    fn max_order(&self) -> usize;

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64;

    fn value(&self, pt: Point2) -> f64 {
        self.derivative(MultiIndex::new(0, 0), pt)
    }

    /// The field as an explicit polynomial, when it is one.
    fn as_poly(&self) -> Option<Poly2> {
        None
    }

    fn require_order(&self, m: usize) -> Result<()> {
        if m > self.max_order() {
            return Err(Error::MissingDerivative {
                name: self.name().to_string(),
                available: self.max_order(),
                requested: m,
            });
        }
        Ok(())
    }
}

impl FieldWithDerivatives for Poly2 {
    fn name(&self) -> &str {
        "polynomial"
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64 {
        self.eval_diff(delta, pt)
    }

    fn as_poly(&self) -> Option<Poly2> {
        Some(self.clone())
    }
}

type DerivFn = dyn Fn(MultiIndex, Point2) -> f64 + Send + Sync;

/// Field given by a closure over `(δ, point)`.
pub struct FnField {
    name: String,
    max_order: usize,
    f: Box<DerivFn>,
}

impl FnField {
    pub fn new(
        name: impl Into<String>,
        max_order: usize,
        f: impl Fn(MultiIndex, Point2) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            max_order,
            f: Box::new(f),
        }
    }
}

impl FieldWithDerivatives for FnField {
    fn name(&self) -> &str {
        &self.name
    }

    fn max_order(&self) -> usize {
        self.max_order
    }

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64 {
        (self.f)(delta, pt)
    }
}

/// `amplitude · sin(πx) sin(πy)`. Vanishes on the boundary of the unit
/// square and satisfies `-Δv = 2π² v`.
#[derive(Debug, Clone, Copy)]
pub struct SinSin {
    pub amplitude: f64,
}

impl SinSin {
    pub fn new() -> Self {
        Self { amplitude: 1.0 }
    }

    /// The right-hand side `-Δv`.
    pub fn laplacian_rhs(&self) -> Self {
        Self {
            amplitude: 2.0 * PI * PI * self.amplitude,
        }
    }
}

impl Default for SinSin {
    fn default() -> Self {
        Self::new()
    }
}

/// `d^n/dx^n sin(πx) = π^n sin(πx + nπ/2)`
fn sin_deriv(n: usize, x: f64) -> f64 {
    let s = (PI * x).sin();
    let c = (PI * x).cos();
    let v = match n % 4 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    };
    PI.powi(n as i32) * v
}

impl FieldWithDerivatives for SinSin {
    fn name(&self) -> &str {
        "sin(pi x) sin(pi y)"
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64 {
        self.amplitude * sin_deriv(delta.dx, pt.x) * sin_deriv(delta.dy, pt.y)
    }
}

/// `x ↦ u(x / Y)`, the push-forward of `u` under `G_Y(x) = Y x`.
pub struct Scaled<'a> {
    pub inner: &'a dyn FieldWithDerivatives,
    pub factor: f64,
}

impl FieldWithDerivatives for Scaled<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    fn derivative(&self, delta: MultiIndex, pt: Point2) -> f64 {
        let y = self.factor;
        y.powi(-(delta.order() as i32)) * self.inner.derivative(delta, pt * (1.0 / y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinsin_derivatives_match_finite_differences() {
        let f = SinSin::new();
        let pt = Point2::new(0.23, 0.61);
        let h = 1e-6;
        let fd = (f.value(Point2::new(pt.x + h, pt.y)) - f.value(Point2::new(pt.x - h, pt.y)))
            / (2.0 * h);
        assert!((fd - f.derivative(MultiIndex::new(1, 0), pt)).abs() < 1e-8);
        let lap = f.derivative(MultiIndex::new(2, 0), pt) + f.derivative(MultiIndex::new(0, 2), pt);
        assert!((-lap - f.laplacian_rhs().value(pt)).abs() < 1e-12);
    }

    #[test]
    fn missing_derivative_is_reported() {
        let f = FnField::new("plane", 1, |d, p| match (d.dx, d.dy) {
            (0, 0) => p.x,
            (1, 0) => 1.0,
            _ => 0.0,
        });
        assert!(f.require_order(1).is_ok());
        assert!(matches!(
            f.require_order(2),
            Err(Error::MissingDerivative { requested: 2, .. })
        ));
    }

    #[test]
    fn scaled_field_pulls_back() {
        let p = Poly2::monomial(2, 0, 1.0).unwrap();
        let s = Scaled {
            inner: &p,
            factor: 2.0,
        };
        // v(x) = (x/2)^2, v'' = 1/2
        assert_eq!(s.derivative(MultiIndex::new(2, 0), Point2::new(5.0, 1.0)), 0.5);
        assert_eq!(s.value(Point2::new(4.0, 0.0)), 4.0);
    }
}
