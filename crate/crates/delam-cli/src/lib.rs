//! Benchmark runner: configuration, curve files and curve comparison.

pub mod compare;
pub mod config;
pub mod curve_io;
pub mod error;
pub mod runner;

pub use error::{CliError, Result};
