//! File formats and commands for the calibrate / predict / evaluate pipeline.

pub mod commands;
pub mod error;
pub mod records;
pub mod sweep;

pub use error::{CliError, CliResult};
