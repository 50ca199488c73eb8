//! Batch front-end for `dynmap-core`: TOML scenarios, trajectory CSV,
//! witness report JSON, parameter sweeps and SVG plots.

pub mod commands;
pub mod config;
pub mod error;
pub mod models;
pub mod output;
pub mod plot;
pub mod scenario;

pub use error::{CliError, CliResult};
