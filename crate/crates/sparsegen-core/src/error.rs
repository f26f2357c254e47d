use thiserror::Error;

/// Errors raised by the library. The variant decides the CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Shapes or lengths that do not fit together.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// A parameter outside its documented domain.
    #[error("argument error: {0}")]
    Argument(String),
    /// The request is well formed but exceeds a size guard or supported mode.
    #[error("capability error: {0}")]
    Capability(String),
    /// An internal consistency check failed.
    #[error("invariant breach: {0}")]
    Invariant(String),
    /// Malformed input file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(format!($($arg)*)))
    };
}
pub(crate) use bail;
