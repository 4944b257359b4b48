use thiserror::Error;

/// Errors raised by the enclosure toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation was applied outside its mathematical domain (log of a
    /// nonpositive range, division by an interval containing zero, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Exterior source placement produced a point inside or on the boundary.
    #[error("source placement failed: {0}")]
    Placement(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("linear solve failed: {message} (condition estimate {condition:.3e})")]
    Solve { message: String, condition: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The source term could not be certified nonnegative and no signed
    /// split was supplied.
    #[error("source term is {0} on the domain; supply a signed split (plus, minus)")]
    NeedsSplit(String),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("iteration budget exhausted: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("output error: {0}")]
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

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
