//! Experiment driver: generates Krylov inputs, runs the orthogonalization
//! kernels over several rounding accuracies and writes CSV tables and SVG
//! figures.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod table;

pub use commands::{cmd_gen, cmd_plot, cmd_run, gen_bytes, RunOutcome};
pub use config::{InputSource, RunConfig};
pub use error::CliError;
