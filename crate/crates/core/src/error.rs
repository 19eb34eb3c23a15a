use thiserror::Error;

/// Errors raised by kaon-core operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KaonError {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("lifetime basis is near-singular (1 - delta^2 = {0:e})")]
    NearSingularBasis(f64),

    #[error("matrix is not Hermitian (max defect {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("state vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("state vector is zero")]
    ZeroVector,

    #[error("trace must be 1 for an initial state (got {0})")]
    InvalidTrace(f64),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("surviving block has decayed away (trace {0:e})")]
    FullyDecayed(f64),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("integrator configuration: {0}")]
    IntegratorConfig(String),
}

pub type Result<T> = std::result::Result<T, KaonError>;
