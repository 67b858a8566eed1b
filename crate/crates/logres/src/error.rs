use thiserror::Error;

/// Errors produced by parsing, arithmetic and the resolution pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable count mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("not divisible: {0}")]
    NotDivisible(String),

    #[error("no exact rational root: {0}")]
    InexactRoot(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("step limit exceeded: {0}")]
    StepLimit(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of a check that can be decided either way or not at all
/// within the monomial fragment the tool works in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Undecidable(String),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}
