use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}): lower bound exceeds upper bound")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("invalid base {0}: must be at least 2")]
    InvalidBase(u32),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("density is not normalized: total mass {0}")]
    Unnormalized(f64),

    #[error("value {0} is outside the domain (must be finite and positive)")]
    Domain(f64),

    #[error("invalid digit block: {0}")]
    InvalidBlock(String),

    #[error("resource limit exceeded: {what} (requested {requested}, limit {limit})")]
    ResourceLimit { what: &'static str, requested: usize, limit: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("no parseable positive values in {0}")]
    NoData(PathBuf),

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

pub type Result<T, E = Error> = std::result::Result<T, E>;
