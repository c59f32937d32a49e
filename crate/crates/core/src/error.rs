use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-unit")]
    NonUnit,
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("size bound exceeded: {0}")]
    TooLarge(String),
    #[error("level {requested} exceeds ring level {level}")]
    LevelOutOfRange { requested: usize, level: usize },
    #[error("element is not in the {0}")]
    NotMember(&'static str),
    #[error("group mismatch")]
    GroupMismatch,
    #[error("subgroup is not abelian")]
    NotAbelian,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
