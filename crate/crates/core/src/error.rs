use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{context}: row {row}: {message}")]
    Row {
        context: &'static str,
        row: usize,
        message: String,
    },

    #[error("malformed header: {0}")]
    Header(String),

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("insufficient history: need at least 2 price points, got {0}")]
    InsufficientHistory(usize),

    #[error("price series is not strictly increasing in date at {0}")]
    UnsortedPrices(NaiveDate),

    #[error("empty join: no date carries both headlines and a label")]
    EmptyJoin,

    #[error("invalid split: {0}")]
    Split(String),

    #[error("no usable walk-forward windows: {0}")]
    NoWindows(String),

    #[error("empty vocabulary after pruning (min_df={min_df})")]
    EmptyVocabulary { min_df: usize },

    #[error("too few terms for negative sampling: vocabulary has {vocab} terms, need at least {needed}")]
    TooFewTerms { vocab: usize, needed: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate class distribution: training labels contain a single class")]
    DegenerateClasses,

    #[error("non-finite {what} during training; try a smaller learning rate")]
    NonFinite { what: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("json error: {0}")]
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
