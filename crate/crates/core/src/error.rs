use thiserror::Error;

/// Failures surfaced by the engine. Precondition violations carry the
/// offending invariant in plain words so the CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} exceeds the configured bound {1}")]
    OutOfRange(String, u64),

    #[error("class polynomial of discriminant {disc} did not round cleanly at {bits} bits")]
    Precision { disc: i64, bits: usize },

    #[error("point count {what} is not integral ({twelfths}/12)")]
    NonIntegral { what: String, twelfths: i64 },

    #[error("certificate replay failed: {0}")]
    Replay(String),

    #[error("cache file error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
