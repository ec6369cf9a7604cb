use thiserror::Error;

/// Every failure the library can report, grouped by how a caller should react.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("model validation failed: {0}")]
    ModelValidation(String),

    #[error("numerical accuracy not reached: {message} (bound {bound:.3e})")]
    NumericalAccuracy { message: String, bound: f64 },

    #[error("unsupported mode: {0}")]
    Unsupported(String),

    #[error("table is missing entry {index:?} of order {order}")]
    IncompleteTable { order: usize, index: Vec<usize> },

    #[error("normalization violated: order-1 entry {index} has modulus {modulus:.3e}")]
    Normalization { index: usize, modulus: f64 },

    #[error("order {0} exceeds the enumeration guard of 12")]
    OrderTooLarge(usize),

    #[error("invalid limit state: {0}")]
    InvalidLimitState(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Unsupported(_) | Error::Io { .. } => 2,
            Error::NumericalAccuracy { .. } | Error::Consistency(_) => 3,
            Error::ModelValidation(_)
            | Error::InvalidLimitState(_)
            | Error::IncompleteTable { .. }
            | Error::Normalization { .. }
            | Error::OrderTooLarge(_) => 4,
        }
    }

    pub(crate) fn accuracy(message: impl Into<String>, bound: f64) -> Self {
        Error::NumericalAccuracy { message: message.into(), bound }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
