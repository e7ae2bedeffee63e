use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown built-in game `{0}` (expected one of: chsh, gyni2, anticorr3)")]
    UnknownGame(String),

    #[error("malformed linear program: {0}")]
    MalformedProgram(String),

    #[error("linear program is {0}")]
    Solver(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
