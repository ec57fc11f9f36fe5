use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is not a bot occurrence")]
    NotABot(String),
    #[error("malformed formula: {0}")]
    Malformed(String),
    #[error("linking: {0}")]
    Linking(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rewiring step {step} failed: {msg}")]
    Step { step: usize, msg: String },
    #[error("budget of {0} states exhausted")]
    Budget(usize),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
