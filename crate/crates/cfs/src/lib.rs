//! Command-line front end for `cfs-core`: problem files with coefficient
//! expressions, CSV/JSON plot data and the commands behind the `cfs` binary.

pub mod config;
pub mod expr;
pub mod output;
pub mod run;

pub use config::{ConfigError, ProblemConfig};
pub use output::{Format, OutputError, Profile};
pub use run::{run, Command, RunConfig, RunError};
