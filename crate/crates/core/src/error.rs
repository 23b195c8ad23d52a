use thiserror::Error;

use crate::eigen::EigenPair;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {matrix_dim} does not match shape total dimension {shape_dim}")]
    ShapeMismatch { matrix_dim: usize, shape_dim: usize },

    #[error("invalid tensor shape: {0}")]
    InvalidShape(String),

    #[error("invalid matrix data: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotSymmetric { defect: f64, tolerance: f64 },

    #[error("operation requires a bipartite shape, got {factors} factors")]
    NotBipartite { factors: usize },

    #[error("subsystem index {index} out of range for {factors} factors")]
    SubsystemOutOfRange { index: usize, factors: usize },

    #[error("basis spans only the zero subspace")]
    ZeroBasis,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Iterative eigensolver ran out of its iteration budget. The best
    /// iterate is attached so callers can continue with a non-certified value.
    #[error(
        "eigenvalue solver did not converge after {iterations} steps \
         (best value {value:.6e}, residual {residual:.3e})"
    )]
    SolverDidNotConverge {
        value: f64,
        residual: f64,
        iterations: usize,
        best: Box<EigenPair>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("matrix file parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
