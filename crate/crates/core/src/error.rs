use thiserror::Error;

/// Errors raised by grid construction, operators, estimators and studies.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Shapes or lengths that do not fit together.
    #[error("structural error: {0}")]
    Structure(String),

    /// A parameter outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a numerical precondition (DC mass, spectral tail, support).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A sampling plan that cannot be evaluated.
    #[error("plan error: {0}")]
    Plan(String),

    /// A parameter hits a pole of a closed-form expression.
    #[error("pole: {0}")]
    Pole(String),

    /// Malformed input file.
    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
