use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unassigned variable {0}")]
    Unassigned(String),
    #[error("sort mismatch: {0}")]
    SortMismatch(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("{0}")]
    NotWinner(String),
    #[error("position outside certificate: {0}")]
    OutsideCertificate(String),
    #[error("propositional skeleton has {0} atoms (limit 12)")]
    SkeletonTooLarge(usize),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
