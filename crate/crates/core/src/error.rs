use crate::detectors::DetectorKind;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by series ingestion, configuration, and detection.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("category code {value} at index {index} is outside 1..={levels}")]
    InvalidCategory {
        value: i64,
        index: usize,
        levels: u32,
    },

    #[error("bandwidth too large: G={bandwidth} requires n >= {min_len}, got n={n}")]
    BandwidthTooLarge {
        bandwidth: usize,
        min_len: usize,
        n: usize,
    },

    #[error("segment [{t1}, {t2}] out of range for series of length {n}")]
    SegmentOutOfRange { t1: usize, t2: usize, n: usize },

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{kind} is not a valid detector kind for this operation: {reason}")]
    InvalidKind { kind: DetectorKind, reason: String },

    #[error("required {kind} input is missing: {reason}")]
    MissingInput { kind: DetectorKind, reason: String },

    #[error("csv error in {path}, row {row}: {message}")]
    CsvParse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("interval lower bound {lo} exceeds upper bound {hi}")]
    InvalidInterval { lo: i64, hi: i64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
