use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HgaError {
    #[error("generator {0} already registered with a different parity")]
    GeneratorConflict(String),
    #[error("more than 64 parity variables requested")]
    TooManyVariables,
    #[error("reduced-mode differential applied to bound generator {0}")]
    BoundInReduced(String),
    #[error("an F-operation inside an E-head or an F-argument has no rewrite rule")]
    FInHead,
    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("slot mismatch: expected {expected} tensor slots, got {got}")]
    Slots { expected: usize, got: usize },
    #[error("term ceiling of {0} live terms exceeded")]
    ResourceLimit(usize),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid bound: {0}")]
    InvalidBound(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
