use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("table miss: x={x} outside [{lo}, {hi}]")]
    TableMiss { x: f64, lo: f64, hi: f64 },
    #[error("parameter error: {0}")]
    Param(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("unknown id: {0}")]
    Unknown(String),
    #[error("syntax error at {start}..{end}: {msg}")]
    Syntax { start: usize, end: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
