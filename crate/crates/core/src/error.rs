use thiserror::Error;

/// Errors raised by the dense kernels, the TT arithmetic and the
/// orthogonalization kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    ConvergenceFailure { sweeps: usize, residual: f64 },

    #[error("Gram matrix is numerically singular: Cholesky pivot {pivot} is {value:e}")]
    NumericallySingularGram { pivot: usize, value: f64 },

    #[error("triangular matrix is singular: zero diagonal entry at {0}")]
    SingularTriangular(usize),

    #[error("tensor has {elements} entries, above the densification cap of {cap}")]
    TooLargeToDensify { elements: u128, cap: usize },

    #[error("Krylov breakdown at vector {step}: norm {norm:e}")]
    KrylovBreakdown { step: usize, norm: f64 },

    #[error("input vector {index} is linearly dependent on the previous ones (residual norm {residual:e})")]
    LinearDependence { index: usize, residual: f64 },

    #[error("Householder vector {index}: squared residual norm {deficit:e} is negative")]
    NumericalDefect { index: usize, deficit: f64 },

    #[error("malformed TTV1 data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
