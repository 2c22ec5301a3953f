//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction, validation and the deciders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    Convergence { sweeps: usize },

    #[error("vector is not normalized: norm {norm}")]
    Normalization { norm: f64 },

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("operator is not unitary: residual {residual:.3e}")]
    NonUnitary { residual: f64 },

    #[error("strategy space too large: {required} states exceeds cap {cap}")]
    Capacity { required: u128, cap: usize },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("indeterminate verdict: {0}")]
    Indeterminate(String),

    #[error("state is not entangled: Schmidt rank 1 at the given tolerance")]
    NotEntangled,

    #[error("scene error: {0}")]
    Scene(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
