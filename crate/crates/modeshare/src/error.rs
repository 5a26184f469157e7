//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("missing required column `{column}` in {path}")]
    MissingColumn { column: String, path: String },

    #[error("{path}:{line}: {message}")]
    BadRow {
        path: String,
        line: u64,
        message: String,
    },

    #[error("share {value} out of range: must lie strictly in (0,1) after canonicalization")]
    ShareOutOfRange { value: f64 },

    #[error("adjusted share {value} falls outside (0,1)")]
    AdjustedShareOutOfRange { value: f64 },

    #[error("boundary contains no population grid cell centroids")]
    EmptyCoverage,

    #[error("invalid boundary: {0}")]
    BadBoundary(String),

    #[error("road network is empty")]
    EmptyNetwork,

    #[error("invalid road network: {0}")]
    BadNetwork(String),

    #[error("spacing {0} m outside the supported [20,100] m range")]
    BadSpacing(f64),

    #[error("metadata lookup failed for point `{point_id}` (retryable): {message}")]
    ClientFailure { point_id: String, message: String },

    #[error("no metadata entry for point `{point_id}`")]
    UnknownPoint { point_id: String },

    #[error("detection references image `{image_id}` absent from the manifest")]
    UnknownImage { image_id: String },

    #[error("unknown vehicle class `{0}`")]
    UnknownClass(String),

    #[error("no ground-truth instances for class `{class}`: average precision undefined")]
    UndefinedAp { class: String },

    #[error("invalid design matrix: {0}")]
    BadDesign(String),

    #[error("mean response for row {row} is numerically {value}: linear predictor overflows the (0,1) range")]
    MuOverflow { row: usize, value: f64 },

    #[error(
        "fit did not converge after {iters} iterations (gradient max-norm {grad_norm:.3e}); \
         last iterate beta={beta:?}, phi={phi}"
    )]
    NonConvergence {
        iters: usize,
        grad_norm: f64,
        beta: Vec<f64>,
        phi: f64,
    },

    #[error("design matrix is rank deficient: column(s) {columns:?} are collinear")]
    RankDeficient { columns: Vec<String> },

    #[error("missing covariate `{0}` for prediction")]
    MissingCovariate(String),

    #[error("series `{0}` has zero variance")]
    ZeroVariance(String),

    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cross-validation fold holding out `{city_id}` failed: {source}")]
    FoldFailed {
        city_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
