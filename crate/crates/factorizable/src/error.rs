use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix data is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m*| = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("tolerances must be strictly positive")]
    InvalidTolerance,

    #[error("inner product is not positive semidefinite (<v,v> = {0:.3e})")]
    IndefiniteInner(f64),

    #[error("{n} does not divide {d}: no unital embedding of order {n} exists")]
    IndivisibleDimension { n: usize, d: usize },

    #[error("invalid matrix-unit system: {0}")]
    InvalidUnits(String),

    #[error("invalid block weights: {0}")]
    InvalidWeights(String),

    #[error("operator dimension {0} is not a perfect square")]
    NotFlattened(usize),

    #[error("element is not block-diagonal (off-block residual {0:.3e})")]
    NotBlockDiagonal(f64),

    #[error("center separation failed after {0} attempts")]
    CenterDegenerate(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid trace data: {0}")]
    InvalidTrace(String),
}

pub type Result<T> = std::result::Result<T, Error>;
