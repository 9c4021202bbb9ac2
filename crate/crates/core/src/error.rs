use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A bucket received more real elements than its public padding bound.
    /// This is the 2^-sigma failure event of the padded operators.
    #[error("padding overflow on server {server} during {stage}")]
    PaddingOverflow { server: usize, stage: String },

    #[error("two real items share distribution target")]
    DuplicateTarget,

    #[error("distribution target outside [1, {slots}]")]
    TargetOutOfRange { slots: usize },

    #[error("duplicate key within the partition of server {server}")]
    DuplicateLocalKey { server: usize },

    #[error("primary-key side of the join has a duplicate key")]
    DuplicatePrimaryKey,

    #[error("sum of repetition counts {sum} exceeds the output bound {bound}")]
    BoundExceeded { sum: u64, bound: u64 },

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.position() {
            Some(pos) => Error::Parse {
                line: pos.line() as usize,
                message: e.to_string(),
            },
            None => Error::Io(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
