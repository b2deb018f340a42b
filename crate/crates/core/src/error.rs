use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polytope is unbounded along coordinate {coordinate}")]
    Unbounded { coordinate: usize },

    #[error("polytope is not Delzant at vertex {vertex:?}: {reason}")]
    NotDelzant { vertex: Vec<f64>, reason: String },

    #[error("point lies outside the open polytope (min facet value {min_facet_value:e})")]
    OutsideInterior { min_facet_value: f64 },

    #[error("singular matrix: {what} (magnitude {value:e})")]
    Singular { what: String, value: f64 },

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("zero coordinate {index} raised to negative power {exponent}")]
    ZeroToNegativePower { index: usize, exponent: i64 },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e} at {points} points)")]
    Quadrature {
        tolerance: f64,
        estimate: f64,
        points: usize,
    },

    #[error("gradient too small to normalise the flow field (|grad| = {norm:e})")]
    DegenerateGradient { norm: f64 },

    #[error("tangent space rank drop (smallest constraint singular value {sigma:e})")]
    RankDrop { sigma: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
