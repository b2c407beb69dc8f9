use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("token id {id} is outside the scoring table (size {size})")]
    AlphabetMismatch { id: usize, size: usize },

    #[error("scoring matrix has no entry for tag {0:?}")]
    UnknownTag(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(
        "score range overflow: inputs of size {n}x{m} with per-step magnitude {step} exceed the 32-bit score budget"
    )]
    Overflow { n: usize, m: usize, step: i64 },

    #[error("index ({i}, {j}) outside a {rows}x{cols} matrix")]
    Index { i: usize, j: usize, rows: usize, cols: usize },

    #[error("input of size {n}x{m} exceeds the brute-force limit of {limit}")]
    OracleTooLarge { n: usize, m: usize, limit: usize },

    #[error("{path}:{line}: {msg}")]
    Record { path: String, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Tagger(#[from] crate::corpus::TaggerError),
}
