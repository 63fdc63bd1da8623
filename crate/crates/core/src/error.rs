use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is not Eulerian")]
    NotEulerian,

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("no simple connected graph after {attempts} attempts")]
    AttemptsExhausted { attempts: u64 },

    #[error("no arborescence rooted at vertex {root}")]
    NoArborescence { root: usize },

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
