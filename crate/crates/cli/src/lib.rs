//! Command-line tools and the annotation HTTP service built on
//! `graphel-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod server;

pub use config::AppConfig;
pub use error::CliError;
