//! Error types shared across the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading inputs, validating configuration, or writing outputs.
#[derive(Debug, Error)]
pub enum CleshError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{file}: empty header")]
    EmptyHeader { file: String },

    #[error("{file}: empty column name at column {column}")]
    EmptyColumnName { file: String, column: usize },

    #[error("{file}: duplicate column name '{name}' at columns {first} and {second}")]
    DuplicateHeader {
        file: String,
        name: String,
        first: usize,
        second: usize,
    },

    #[error("SHAP file has no column named '{name}' (present in features file)")]
    MissingHeader { name: String },

    #[error("column count mismatch: features file has {features} columns, SHAP file has {shap}")]
    ColumnMismatch { features: usize, shap: usize },

    #[error("row count mismatch: features file has {features} rows, SHAP file has {shap}")]
    RowMismatch { features: usize, shap: usize },

    #[error("{file}: row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        file: String,
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("{file}: non-numeric value '{value}' at row {row}, column {column} ('{name}')")]
    NonNumeric {
        file: String,
        row: usize,
        column: usize,
        name: String,
        value: String,
    },

    #[error("{file}: non-finite value at row {row}, column {column} ('{name}')")]
    NonFinite {
        file: String,
        row: usize,
        column: usize,
        name: String,
    },

    #[error("feature column '{name}' has {found} values, expected {expected}")]
    ColumnLength {
        name: String,
        found: usize,
        expected: usize,
    },

    #[error("at least {needed} samples are required, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("label name must not be empty")]
    EmptyLabel,

    #[error("config line {line}: expected `key = value`, found '{text}'")]
    ConfigSyntax { line: usize, text: String },

    #[error("unknown config key '{0}'")]
    UnknownKey(String),

    #[error("invalid value '{value}' for config key '{key}': {reason}")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("analysis failed: {0}")]
    Analysis(String),
}

pub type Result<T, E = CleshError> = std::result::Result<T, E>;
