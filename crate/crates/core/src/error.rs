use thiserror::Error;

/// Errors raised by the invariant library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes or formats that do not fit together.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Input that is well-shaped but violates a precondition.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The permutation sum would exceed the configured leaf-product budget.
    #[error("budget exceeded: {required:.3e} leaf products needed, budget is {budget:.3e}")]
    Budget { required: f64, budget: f64 },
    /// A randomized construction gave up after its attempt limit.
    #[error("sampling failed: {0}")]
    Sampling(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
