use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `line` and `column` are zero-based; the message shows them one-based.
    #[error("parse error at byte {offset} (line {}, column {}): {message}", line + 1, column + 1)]
    Parse {
        offset: u64,
        line: u64,
        column: u64,
        message: String,
    },
    #[error("{what} {value} out of range (must be < {bound})")]
    Range {
        what: &'static str,
        value: u64,
        bound: u64,
    },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid state: {0}")]
    State(&'static str),
    #[error("enumeration guard exceeded: {count} candidates > {limit}")]
    Guard { count: u128, limit: u128 },
    #[error("incompatible sketches: {0}")]
    Incompatible(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("malformed serialized data: {0}")]
    Format(String),
    #[error("element {0} is not covered by any set")]
    IsolatedElement(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}
