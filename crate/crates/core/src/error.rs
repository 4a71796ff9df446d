use thiserror::Error;

pub type Result<T, E = SffError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum SffError {
    /// A parameter is outside the range accepted by the operation.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The parameters are valid in principle but the construction is not provided.
    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    /// A closed-form prediction hit one of its singular points.
    #[error("singular point: {0}")]
    Singular(String),

    /// A numerical certificate (unitarity, eigen-residual, convergence) failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Too few usable data points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Building the requested object would exceed the dense-size limits.
    #[error("resource limit: {0}")]
    Resource(String),

    /// The Monte-Carlo failure budget was exceeded.
    #[error("{failed} of {total} samples failed numerical checks (first: {first})")]
    TooManyFailures {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SffError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        SffError::Parameter(msg.into())
    }
}
