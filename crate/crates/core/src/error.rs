use thiserror::Error;

/// Errors raised by the interpolation, estimation and finite element routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate triangle: signed area {area:e}")]
    DegenerateTriangle { area: f64 },

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("invalid standard form: {0}")]
    InvalidStandardForm(String),

    #[error("order {order} out of range ({min}..={max})")]
    OrderOutOfRange { order: usize, min: usize, max: usize },

    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeTooHigh { degree: usize, cap: usize },

    #[error("barycentric exponent sum {sum} exceeds {max}")]
    ExponentOverflow { sum: usize, max: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature degree {0} out of range (1..=20)")]
    QuadratureDegree(usize),

    #[error("field `{name}` provides derivatives up to order {available}, {requested} requested")]
    MissingDerivative {
        name: String,
        available: usize,
        requested: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad user input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Singular(_) | Error::NoConvergence { .. } | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
