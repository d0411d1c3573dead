use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid exponents: {0}")]
    InvalidExponents(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("weight |x|^-{exponent} is not integrable at the origin in dimension {dim}; pass an inner cutoff")]
    DivergentWeight { exponent: f64, dim: usize },

    #[error("direct sum over {points} points exceeds the cost cap of {cap} for dimension {dim}")]
    CostCap {
        dim: usize,
        points: usize,
        cap: usize,
    },

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("operator pair built from different region masks (kappa {left} vs {right})")]
    MaskMismatch { left: f64, right: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
