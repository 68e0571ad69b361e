//! Lagrange interpolation on arbitrary triangles and numerical checks of
//! circumradius-based interpolation error estimates.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: triangle metrics, the standard position and the
//!   matrix/Kronecker eigenvalue facts used to move derivatives between
//!   triangles.
//! - [`polynomial`]: dense bivariate polynomials with exact integration.
//! - [`interpolation`]: node sets, Lagrange bases and interpolation errors.
//! - [`norms`]: quadrature and Sobolev seminorms.
//! - [`bconst`]: lower bounds for the interpolation error constant.
//! - [`experiments`]: triangle families and rate sweeps.
//! - [`fem`]: a P1 Poisson solver on anisotropic criss-cross meshes.
//! - [`report`]: deterministic CSV and JSON output.

pub mod bconst;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod geometry;
pub mod interpolation;
pub mod norms;
pub mod polynomial;
pub mod report;

pub use error::{Error, Result};
pub use geometry::{Point2, Triangle};
pub use polynomial::{MultiIndex, Poly2};
