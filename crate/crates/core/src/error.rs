use thiserror::Error;

/// Errors produced by the density, quantizer, bound and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point-mass noise has no density")]
    NoDensity,

    #[error("density is not differentiable at w = {w}")]
    NotDifferentiable { w: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid slope vector at prefix index {index}: {reason}")]
    InvalidSlopes { index: usize, reason: String },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate output probability g = {g} at theta = {theta}")]
    DegenerateProbability { theta: f64, g: f64 },

    #[error("iterate is inadmissible: nonpositive g' denominator at grid index {index}")]
    InadmissibleIterate { index: usize },

    #[error("quantizer is not admissible under this noise")]
    Inadmissible,

    #[error("optimization failed: {0}")]
    OptimizationFailure(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
