use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable `{0}` is not in the team's domain")]
    UnknownVariable(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("row {row} has {found} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("team has {rows} rows, brute-force cap is {cap}")]
    SizeLimit { rows: usize, cap: usize },

    #[error("formula shape: {0}")]
    FormulaShape(String),

    #[error("classification: {0}")]
    Classification(String),

    #[error("orientation impossible: {0}")]
    OrientationImpossible(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported pattern: {0}")]
    UnsupportedPattern(String),

    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("config: {0}")]
    Config(String),

    #[error("engines disagree: {0}")]
    EngineDisagreement(String),

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
