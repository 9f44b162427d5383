//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by grid construction, operator assembly and the
/// spectral routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty domain: expected a < b, got [{a}, {b}]")]
    EmptyDomain { a: f64, b: f64 },

    #[error("breakpoint {value} is not finite")]
    NonFiniteBreakpoint { value: f64 },

    #[error("breakpoint {value} lies outside the domain [{a}, {b}]")]
    BreakpointOutsideDomain { value: f64, a: f64, b: f64 },

    #[error("integrand is not finite at node {node} (value {value})")]
    NonFiniteSample { node: f64, value: f64 },

    #[error("kernel evaluation at ({s}, {t}) is not finite")]
    NonFiniteKernel { s: f64, t: f64 },

    #[error("kernel is not symmetric: |k({s},{t}) - k({t},{s})| = {defect:e}")]
    AsymmetricKernel { s: f64, t: f64, defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator of dimension 0")]
    EmptyOperator,

    #[error("operator is not symmetric: max |M - M^T| = {defect:e}")]
    NotSymmetric { defect: f64 },

    #[error("operator has no dense representation; requested operation needs one")]
    NotDense,

    #[error(
        "dense size {size} exceeds the configured cap {cap}; raise the cap or \
         use the matrix-free path"
    )]
    DenseCapExceeded { size: usize, cap: usize },

    #[error("quadratic form of the zero vector is undefined")]
    ZeroVector,

    #[error("requested {requested} eigenpairs of a dimension-{dim} operator")]
    TooManyEigenpairs { requested: usize, dim: usize },

    #[error(
        "iterative eigensolver did not converge after {iterations} iterations; \
         best residuals {residuals:?}"
    )]
    NonConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("operator order A <= B violated: min eigenvalue of B - A is {min_eig:e}")]
    OrderViolated { min_eig: f64 },

    #[error("family is not orthonormal: max Gram defect {defect:e} exceeds {tol:e}")]
    NotOrthonormal { defect: f64, tol: f64 },

    #[error(
        "essential edge is attained by {attained} (edge {lambda_other:+e} < {lambda_this:+e}); \
         use the check for the other axis"
    )]
    EdgeComponentMismatch {
        attained: &'static str,
        lambda_this: f64,
        lambda_other: f64,
    },

    #[error("standing assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("eigensolver backend failed: {0}")]
    Backend(String),
}

pub type Result<T> = std::result::Result<T, Error>;
