//! Command-line front end: configuration, subcommands and file output.

pub mod bench;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod svg;

pub use commands::{run, Outcome};
pub use config::{parse_config, Overrides, RunConfig};
pub use error::{CliError, Result};
