//! Command-line front end: scenario documents, report rendering and the
//! `qubitks` commands.

pub mod cli;
pub mod document;
pub mod report;

pub use cli::{run, run_args, Cli, Output};
