//! Configuration, presets and batch execution for the `fnls` command.

pub mod config;
pub mod error;
pub mod presets;
pub mod run;
pub mod sweep;

pub use config::RunConfig;
pub use error::{CliError, Result};
pub use run::{run, simulate, RunSummary, Simulation};
