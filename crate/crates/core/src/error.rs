use thiserror::Error;

/// Errors produced anywhere in the collocation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescmError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("differentiation order {0} is not supported (expected 0, 1 or 2)")]
    UnsupportedOrder(u32),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("non-finite value {value} while evaluating {what} at x = {x}")]
    NonFinite {
        what: &'static str,
        x: f64,
        value: f64,
    },

    #[error("declared parity does not hold: {what} deviates by {deviation:e} at x = {x}")]
    ParityViolation {
        what: &'static str,
        x: f64,
        deviation: f64,
    },

    #[error("problem does not commute with parity; centrosymmetric packing refused")]
    NotParityCommuting,

    #[error("matrix is not centrosymmetric: max deviation {max_deviation:e} exceeds {tolerance:e}")]
    NotCentrosymmetric { max_deviation: f64, tolerance: f64 },

    #[error("matrix is not symmetric: max deviation {max_deviation:e} exceeds {tolerance:e}")]
    NotSymmetric { max_deviation: f64, tolerance: f64 },

    #[error("weights must be strictly positive (index {index}: {value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("jacobi iteration did not converge after {sweeps} sweeps (max off-diagonal {max_offdiag:e})")]
    NoConvergence { sweeps: usize, max_offdiag: f64 },

    #[error("lambert W0 requires x >= 0, got {0}")]
    LambertDomain(f64),

    #[error("invalid mesh parameters: {0}")]
    InvalidMeshParams(String),

    #[error("invalid benchmark request: {0}")]
    InvalidRequest(String),
}

pub type Result<T> = std::result::Result<T, DescmError>;
