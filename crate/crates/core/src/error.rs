use thiserror::Error;

/// Errors raised by the embedding library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A derivative of total order `requested` was asked of a kernel that is only
    /// differentiable up to `available` in each slot.
    #[error("unsupported derivative order {requested} (kernel smoothness {available})")]
    UnsupportedOrder { requested: u32, available: u32 },

    #[error("numerical inconsistency: {0}")]
    NumericalInconsistency(String),

    #[error("quadrature budget exceeded after {evaluations} evaluations")]
    QuadratureBudgetExceeded { evaluations: usize },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
