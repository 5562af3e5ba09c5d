//! Configuration, experiment runner, model curves and the acceptance suite
//! behind the `uavmon` command.

pub mod acceptance;
pub mod config;
pub mod curves;
pub mod runner;

pub use config::{load_config, Algorithm, ConfigError, RunConfig};
pub use runner::{run, run_into, Report, RunError};
