//! Files, experiments and the command-line front end for `limbsynth-core`.

pub mod bench;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use error::{CliError, Result};
