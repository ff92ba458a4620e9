use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants map onto the CLI exit-code contract: `Parse`/`Io`/`Shape`
/// are input errors, `Invariant` is a state invariant failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("size error: {what} exceeds the configured maximum of {max}")]
    Size { what: String, max: usize },
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invariant violated ({invariant}): {detail}")]
    Invariant { invariant: &'static str, detail: String },
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant { invariant, detail: detail.into() }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
