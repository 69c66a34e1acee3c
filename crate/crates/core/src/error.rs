use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown graph node `{0}`")]
    UnknownNode(String),
    #[error("unknown detector `{0}`")]
    UnknownDetector(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid report: {0}")]
    Report(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
