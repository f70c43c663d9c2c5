use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("line {line}: unknown phase label {label:?} (expected \"charge\" or \"discharge\")")]
    UnknownPhase { line: u64, label: String },

    #[error("telemetry header mismatch: expected {expected:?}, found {found:?}")]
    Header { expected: String, found: String },

    #[error("invalid metadata: {0}")]
    Metadata(String),

    #[error("invalid segments: {0}")]
    Segment(String),

    #[error("no usable cycles")]
    NoUsableCycles,

    #[error("degenerate trace: {0} sample(s), at least 2 required")]
    DegenerateTrace(usize),

    #[error("zero-energy charge phase")]
    ZeroEnergyCharge,

    #[error("undefined correlation")]
    UndefinedCorrelation,

    #[error("series too short: {len} value(s), at least {min} required")]
    SeriesTooShort { len: usize, min: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("degenerate design")]
    DegenerateDesign,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("no telemetry/metadata pairs found in {0}")]
    EmptyInput(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
