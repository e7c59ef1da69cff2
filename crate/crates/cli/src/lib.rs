//! Experiment runner library behind the `dmbm` binary: spec files, result
//! serialization, and experiment dispatch.

pub mod error;
pub mod results;
pub mod run;
pub mod spec;

pub use error::{CliError, CliResult};
