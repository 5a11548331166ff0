use thiserror::Error;

/// Crate-wide error type. Variants are grouped by the subsystem that raises
/// them: input validation, learner protocol, file parsing, and verification.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite {what}")]
    NonFinite { what: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("feature index {index} out of bounds for dimension {dim}")]
    IndexOutOfBounds { index: usize, dim: usize },

    #[error("feature indices must be strictly increasing; offending index {index}")]
    UnsortedIndex { index: usize },

    #[error("subgradient magnitude {0} breaks the |g| <= 1 Lipschitz contract")]
    GradientOutOfRange(f64),

    #[error("loss input mismatch: expected {expected}, got {got}")]
    LabelMismatch { expected: &'static str, got: &'static str },

    #[error("class label {class} out of range for {classes} classes")]
    ClassOutOfRange { class: usize, classes: usize },

    #[error("learner protocol violation: {0}")]
    Protocol(&'static str),

    #[error("line {line}: {msg}")]
    LibsvmParse { line: usize, msg: String },

    #[error("row {row}, column {col}: {msg}")]
    CsvParse { row: usize, col: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coordinate {coord} never received a nonzero input; first-activity terms are undefined")]
    UndefinedTau { coord: usize },

    #[error("history diverges from a faithful replay at trial {t}, coordinate {coord}: {detail}")]
    HistoryMismatch { t: u64, coord: usize, detail: String },

    #[error("true-loss regret {true_regret} exceeds linearized regret {linearized} beyond tolerance")]
    RegretOrder { true_regret: f64, linearized: f64 },

    #[error("scaling factor at index {index} must be positive and finite, got {value}")]
    BadScaleFactor { index: usize, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
