//! Configuration, command dispatch and file output for the `tradedyn` binary.

pub mod app;
pub mod commands;
pub mod config;
pub mod output;

pub use app::run;
pub use commands::{run_command, Command, CommandError, EXIT_ASSERTION, EXIT_CONFIG, EXIT_OK};
pub use config::{parse_config, parse_config_with, ConfigError, RunConfig};
pub use output::{format_price, write_summary, write_trajectory, OutputError};
