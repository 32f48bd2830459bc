//! Library backing the `tempograph` binary: pipeline configuration,
//! fixed-width interval decomposition, PCA reporting, decomposition
//! comparison, and all file exports.

pub mod compare;
pub mod config;
pub mod exports;
pub mod intervals;
pub mod pca;
pub mod runner;

pub use config::PipelineConfig;
pub use exports::OutputFormat;
