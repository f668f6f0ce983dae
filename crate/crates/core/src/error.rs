use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("unknown terminal id {0}")]
    UnknownTerminal(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("{what} has {size} elements, limit is {limit}")]
    TooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("instance lacks bounded distance: D_max/D_min = {ratio} exceeds C = {c}")]
    UnboundedDistance { ratio: f64, c: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0}; raise epsilon or relax the overridden constants")]
    ResourceLimit(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
