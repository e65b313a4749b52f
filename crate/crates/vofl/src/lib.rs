//! File formats, configuration and subcommands of the `vofl` tool.

pub mod commands;
pub mod config;
pub mod error;
pub mod files;
pub mod profile;
pub mod schema;
pub mod source;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, CliResult};
