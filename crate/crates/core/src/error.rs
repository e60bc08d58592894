use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown reference `{0}`")]
    UnknownReference(String),

    #[error("`{name}` takes {expected} argument(s), found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("selection {selection} does not fit principle {principle}")]
    TypeMismatch {
        principle: String,
        selection: String,
    },

    #[error("input witness rejected: {0}")]
    InvalidInputWitness(String),

    /// A theorem's witness transformer produced something replay rejects.
    #[error("mapped witness rejected: {0}")]
    MappedWitnessRejected(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
