use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("malformed Borel code: {0}")]
    MalformedCode(String),
    #[error("unbound variable x{0}")]
    UnboundVariable(u32),
    #[error("free variable x{0} in a sentence")]
    FreeVariable(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid vocabulary: {0}")]
    Vocabulary(String),
    #[error("vocabulary mismatch")]
    VocabularyMismatch,
    #[error("presentation has no decidable diagram; use budgeted access")]
    UndecidablePresentation,
    #[error("not a linear order: {0}")]
    NotALinearOrder(String),
    #[error("operation needs a finite universe")]
    InfiniteUniverse,
    #[error("operation needs finite index families")]
    InfiniteFamily,
    #[error("operator must be sanitized first")]
    UnsanitizedOperator,
    #[error("unsupported catalog structure: {0}")]
    UnsupportedCatalog(String),
    #[error("no type-equivalent tuple exists: {0}")]
    NoMatch(String),
    #[error("invalid forcing condition: {0}")]
    InvalidCondition(String),
    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
