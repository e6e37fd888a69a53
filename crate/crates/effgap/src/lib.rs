//! Command-line front end for `effgap-core`: configuration, density
//! specifications, parallel replication and atomic output.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use error::CliError;
