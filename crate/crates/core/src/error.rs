use thiserror::Error;

/// Everything that can go wrong, split into input problems and engine bugs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {message} (at `{token}`)")]
    Parse { line: usize, token: String, message: String },

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("validation failed: {identity}; witness: {witness}")]
    Validation { identity: String, witness: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("star unavailable: {0}; skipping *_s cross-checks")]
    StarUnavailable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    /// The mathematics disagrees with itself. Never caused by user input.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }

    pub(crate) fn parse(line: usize, token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { line, token: token.into(), message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
