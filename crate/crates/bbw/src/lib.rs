//! File formats, configuration and subcommands of the `bbw` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;

pub use commands::{run, Command, Outcome, Request};
pub use config::{Experiment, ExperimentConfig, FunctionSpec, KnotSpec};
pub use error::CliError;
