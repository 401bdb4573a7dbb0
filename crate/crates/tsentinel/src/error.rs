//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by trace parsing, model fitting, and the CLI plumbing.
#[derive(Error, Debug)]
pub enum Error {
    #[error("malformed number {value:?} in column {column} at row {row}")]
    MalformedNumber {
        row: usize,
        column: String,
        value: String,
    },

    #[error("missing required column {name}")]
    MissingColumn { name: String },

    #[error("row {row} has {got} fields, expected {expected}")]
    WrongFieldCount {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-uniform timestamp spacing at row {row}")]
    NonUniformSpacing { row: usize },

    #[error("{field} = {value} out of range at row {row}")]
    OutOfRange {
        row: usize,
        field: String,
        value: f64,
    },

    #[error("mixed labeling at row {row}: traces must be fully labeled or fully unlabeled")]
    MixedLabeling { row: usize },

    #[error("unknown label token {token:?} at row {row}")]
    UnknownLabel { row: usize, token: String },

    #[error("unknown feature name {name:?}")]
    UnknownFeature { name: String },

    #[error("feature name list is empty")]
    EmptyFeatureList,

    #[error("duplicate feature name {name:?}")]
    DuplicateFeature { name: String },

    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },

    #[error("feature names do not match: expected {expected:?}, got {got:?}")]
    FeatureNameMismatch {
        expected: Vec<String>,
        got: Vec<String>,
    },

    #[error("eigen solver did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    #[error("zero total variance: all eigenvalues are zero")]
    ZeroVariance,

    #[error("matrix is unlabeled: {context}")]
    Unlabeled { context: String },

    #[error("k must be odd and positive, got {k}")]
    EvenK { k: usize },

    #[error("k = {k} exceeds the number of training rows {n}")]
    KTooLarge { k: usize, n: usize },

    #[error("dimension mismatch: model expects {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {left} predictions vs {right} truth labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {context}")]
    EmptyInput { context: String },

    #[error("confusion matrix has zero total count")]
    EmptyConfusion,

    #[error("window must be odd and positive, got {window}")]
    EvenWindow { window: usize },

    #[error("sampling intervals differ: {a} vs {b}")]
    IntervalMismatch { a: f64, b: f64 },

    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },

    #[error("invalid flag value: {reason}")]
    InvalidFlag { reason: String },

    #[error("evaluation requires labels: {context}")]
    MissingLabels { context: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
