use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("sort error: {0}")]
    Sort(String),

    #[error("signature error: {0}")]
    Signature(String),

    #[error("ill-formed input: {0}")]
    Input(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {what} (after {steps} steps)")]
    Budget {
        what: String,
        steps: usize,
        trace: Vec<String>,
    },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
