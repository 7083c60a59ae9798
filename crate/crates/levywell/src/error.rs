use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A physical parameter is outside its legal range.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation was called in a way its contract forbids.
    #[error("usage error: {0}")]
    Usage(String),

    /// Two operands live on incompatible grids or have mismatched lengths.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An iterative numerical procedure failed to reach its tolerance.
    #[error("numerical failure in {what}: achieved {achieved:.3e}, requested {requested:.3e}")]
    NumericalFailure {
        what: String,
        achieved: f64,
        requested: f64,
    },
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Usage(_) | Error::Shape(_) => 2,
            Error::NumericalFailure { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
