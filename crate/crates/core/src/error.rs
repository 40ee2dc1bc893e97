use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("turn error: expected {expected} to move")]
    Turn { expected: &'static str },
    #[error("no move to undo")]
    Underflow,
    #[error("game is over")]
    GameOver,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("oracle capacity exceeded: {0}")]
    Capacity(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("patterns are not compatible")]
    Incompatible,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("search budget exhausted before the first iteration completed")]
    BudgetExhausted,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
