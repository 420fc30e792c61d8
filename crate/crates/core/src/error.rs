use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("input matrix is zero")]
    ZeroInput,

    #[error("no separating witness found")]
    WitnessNotFound,

    #[error("det(map(I)) vanishes, scale factor undefined")]
    DegenerateUnit,

    #[error("could not draw an invertible sample")]
    SingularSample,

    #[error("map is not unital (|map(I) - I| = {residual:.3e})")]
    NotUnital { residual: f64 },

    #[error("map is not linear (consistency residual {residual:.3e})")]
    NotLinear { residual: f64 },

    #[error("map is not of canonical form: {0}")]
    NotCanonical(String),

    #[error("recovered factors are not a *-pair (deviation {deviation:.3e})")]
    NotStarForm { deviation: f64 },

    #[error("map(I) is not invertible")]
    SingularUnit,

    #[error("matrix is not rank one (sigma2/sigma1 = {ratio:.3e})")]
    NotRankOne { ratio: f64 },

    #[error("recovered map deviates from the black box (residual {residual:.3e})")]
    RecoveryResidual { residual: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
