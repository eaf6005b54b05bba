pub mod config;
pub mod curves;
pub mod dataset;
pub mod error;
pub mod format;
pub mod interaction;
pub mod pipeline;
pub mod report;
pub mod selection;
pub mod stats;
pub mod synthetic;
pub mod univariate;
