use thiserror::Error;

/// Everything that can go wrong while building states or evaluating entropies.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mixture weights must be nonnegative, distinct and sum to 1 (sum = {sum})")]
    NonNormalizedMixture { sum: f64 },

    #[error("two-mode squeezing parameter must lie in [0, 1), got {0}")]
    LambdaOutOfRange(f64),

    #[error("thermal state needs beta*omega > 0, got {0}")]
    InvalidTemperature(f64),

    #[error("inadmissible covariance: smallest symplectic eigenvalue {min_eigenvalue} < 1/2")]
    InadmissibleCovariance { min_eigenvalue: f64 },

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not symmetric (max asymmetry {0})")]
    NonSymmetric(f64),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not bipartite")]
    NotBipartite,

    #[error("cannot condition on a point where the marginal density vanishes")]
    ConditionOnZeroDensity,

    #[error("subsystem block has vanishing determinant")]
    DegenerateBlock,

    #[error("support violation: Q_rho > 0 where Q_sigma vanishes")]
    SupportViolation,

    #[error("quadrature did not reach tolerance: value {value}, error estimate {error_estimate} after {nodes_used} nodes")]
    ToleranceNotReached {
        value: f64,
        error_estimate: f64,
        nodes_used: usize,
    },

    #[error("operation not supported for this state: {0}")]
    UnsupportedState(&'static str),

    #[error("normal-form parameters do not describe a pure state ({0})")]
    NotPure(String),

    #[error("invalid quadrature specification: {0}")]
    InvalidQuadrature(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
