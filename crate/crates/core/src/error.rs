use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {expected} vs {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation of U^dag U from I: {0:.3e})")]
    NotUnitary(f64),

    #[error("trace deviates from 1 (got {0})")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:.3e} below the allowed floor")]
    NegativeEigenvalue(f64),

    #[error("eigenphase clustering is inconsistent at tolerance {tol:.1e} (cluster spread {spread:.3e})")]
    Clustering { tol: f64, spread: f64 },

    #[error("closed-form eigenvector degenerates at k = ({kx}, {ky}), omega = {omega} (norm {norm:.3e})")]
    DegeneratePoint { kx: f64, ky: f64, omega: f64, norm: f64 },

    #[error("e^(i {omega}) is not an eigenvalue of U_k (residual {residual:.3e})")]
    NotAnEigenvalue { omega: f64, residual: f64 },

    #[error("coin state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("wave vector component {0} outside [-pi, pi]")]
    WaveVectorRange(f64),

    #[error("position distribution {0} is not supported here")]
    UnsupportedPosition(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge after {} grids: {history:?}", history.len())]
    NonConvergence { history: Vec<(usize, f64)> },

    #[error("walk would leave the lattice: step {step} exceeds capacity {capacity}")]
    LightConeExceeded { step: usize, capacity: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
