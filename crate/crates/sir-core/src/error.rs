use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series `{id}` has no observations")]
    EmptySeries { id: String },

    #[error("series `{id}` has a non-finite value at timestamp {t}")]
    NonFinite { id: String, t: usize },

    #[error("length mismatch: series `{a}` has {la} observations, `{b}` has {lb}")]
    LengthMismatch {
        a: String,
        la: usize,
        b: String,
        lb: usize,
    },

    #[error("interval [{s},{e}] is out of bounds for series of length {n}")]
    IntervalOutOfBounds { s: usize, e: usize, n: usize },

    #[error("result pair ({ra},{rb}) does not match engine pair ({ea},{eb})")]
    PairMismatch {
        ra: String,
        rb: String,
        ea: String,
        eb: String,
    },

    #[error("series `{id}` has zero variance")]
    ZeroVariance { id: String },

    #[error("segment [{s},{e}] of series `{id}` has zero variance")]
    ZeroVarianceSegment { id: String, s: usize, e: usize },

    #[error("need at least two series, got {n}")]
    TooFewSeries { n: usize },

    #[error("series `{id}` has {n} observations; randomization needs at least 3")]
    TooShortForRandomization { id: String, n: usize },

    #[error("correlation target {rho} is not in [-1,1]")]
    InvalidRho { rho: f64 },

    #[error("window length {window} exceeds series length {n}")]
    WindowTooLong { window: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown series `{id}`")]
    UnknownSeries { id: String },

    #[error("failed to read `{path}`: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse `{path}`: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("`{path}` has no data rows")]
    NoDataRows { path: PathBuf },

    #[error("row {row} has {got} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid numeric value `{value}` at row {row}, column `{col}`")]
    BadCell {
        value: String,
        row: usize,
        col: String,
    },

    #[error("duplicate column name `{name}`")]
    DuplicateColumn { name: String },

    #[error("invalid sidecar config `{path}`: {message}")]
    BadSidecar { path: PathBuf, message: String },

    #[error("invalid segment boundaries: {0}")]
    BadSegments(String),

    #[error("period must be at least 1")]
    BadPeriod,
}

pub type Result<T> = std::result::Result<T, Error>;
