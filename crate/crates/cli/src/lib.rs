//! Batch runner for α-IDT experiments: configs in, reports out.

pub mod config;
pub mod error;
mod fsio;
pub mod runner;
pub mod table;

pub use config::{ExperimentConfig, TestDescriptor};
pub use error::{CliError, CliResult};
pub use fsio::write_atomic;
pub use runner::{calibrate_cmd, export_paths, load_config, report, run, Overrides, Summary};
pub use table::{TableEntry, TableKey, ThresholdTable};
