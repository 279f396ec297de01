//! Command-line front end for `designforge`: file formats, certificates,
//! fixtures and the subcommand implementations.

pub mod commands;
pub mod error;
pub mod fixtures;
pub mod format;

pub use error::CliError;
