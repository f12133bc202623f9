use std::path::PathBuf;

use thiserror::Error;

use crate::expr::Operator;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("row {row}, column '{column}': cannot parse '{value}' as a number")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column '{column}': value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("duplicate column name '{0}'")]
    DuplicateColumn(String),

    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),

    #[error("dataset too small: {instances} instances x {features} features (need at least 2 x 2)")]
    TooSmall { instances: usize, features: usize },

    #[error("dataset has no class labels")]
    MissingLabels,

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("tree {tree} references feature f{feature}, but the dataset has {features} features")]
    FeatureOutOfRange {
        tree: usize,
        feature: usize,
        features: usize,
    },

    #[error("operator '{}' has no cost class in the cost model", .0.name())]
    UnassignedOperator(Operator),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
