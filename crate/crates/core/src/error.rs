use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Arithmetic is exact: intermediate values live in checked `i128` (or
/// arbitrary precision where the magnitudes are not known in advance), so
/// an overflow surfaces as [`Error::Overflow`] instead of a wrong answer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unknown lattice `{0}`")]
    Lookup(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("no fundamental chamber found within {max_level} levels")]
    NonTermination { max_level: u32 },
    #[error("unrecognised fiber graph: {0}")]
    Classification(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
