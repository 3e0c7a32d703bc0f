use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rule {0} is not a toggle rule")]
    NotToggle(u8),
    #[error("rule {0} is not supported here: {1}")]
    UnsupportedRule(u8, &'static str),
    #[error("rule {0} is not affine")]
    NotAffine(u8),
    #[error("{what} = {value} exceeds the limit of {limit}")]
    BoundExceeded { what: &'static str, value: usize, limit: usize },
    #[error("index {index} out of range for {len} cells")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("pattern absent: {0}")]
    PatternAbsent(&'static str),
    #[error("no predecessor exists")]
    NoPredecessor,
    #[error("no consistent seed: {0}")]
    NoConsistentSeed(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
