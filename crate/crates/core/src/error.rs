//! Error type shared by every module, with a stable mapping to process
//! exit codes for the CLI.

use std::io;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument or input violates a precondition (bad interval, k < 2,
    /// M0 < 6, mismatched exponents, failed verification, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A k-th power or prefix sum does not fit in 128 bits.
    #[error("overflow error: {0}")]
    Overflow(String),

    /// The prime table or prefix array is too small for the requested range.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// Malformed input data (representation streams, reports, checkpoints).
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }

    pub fn coverage(msg: impl Into<String>) -> Self {
        Error::Coverage(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    /// Exit code contract: 0 success, 2 domain/parse, 3 coverage/overflow,
    /// 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Parse(_) => 2,
            Error::Coverage(_) | Error::Overflow(_) => 3,
            Error::Io(_) => 4,
        }
    }

    /// Prefix the message with job context, keeping the variant (and hence
    /// the exit code) intact.
    pub fn in_context(self, ctx: &str) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Overflow(m) => Error::Overflow(format!("{ctx}: {m}")),
            Error::Coverage(m) => Error::Coverage(format!("{ctx}: {m}")),
            Error::Parse(m) => Error::Parse(format!("{ctx}: {m}")),
            Error::Io(e) => Error::Io(io::Error::new(e.kind(), format!("{ctx}: {e}"))),
        }
    }
}
