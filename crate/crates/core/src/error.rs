use thiserror::Error;

pub type Result<T> = std::result::Result<T, PathError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("empty family: {0}")]
    EmptyFamily(String),

    #[error("length mismatch: expected {expected} steps, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("path is not a member of the family")]
    NotMember,

    #[error("paths belong to different step parameters")]
    ParamsMismatch,

    #[error("height difference sum {sum} not divisible by a+b = {modulus}")]
    Indivisible { sum: i64, modulus: i64 },

    #[error("size guard exceeded: {what} is {count}, limit {limit}")]
    SizeGuard {
        what: &'static str,
        count: f64,
        limit: f64,
    },

    #[error("coupling did not coalesce within {cap} steps")]
    NotCoalesced { cap: u64 },

    #[error("uniform weights have no positive contraction constant")]
    UniformWeights,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("malformed path record: {0}")]
    Parse(String),
}

impl PathError {
    /// Whether this error is a validation failure of user-supplied input
    /// (as opposed to a resource guard or a sampler failure).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            PathError::InvalidParams(_)
                | PathError::EmptyFamily(_)
                | PathError::LengthMismatch { .. }
                | PathError::NotMember
                | PathError::ParamsMismatch
                | PathError::Parse(_)
        )
    }
}
