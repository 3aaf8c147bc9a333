//! Command-line front end and file formats for the `hardedge-core` numerics.
//!
//! Every subcommand resolves a [`config::RunConfig`], runs one pipeline, prints a
//! one-line summary and, given `--out DIR`, writes `DIR/<stem>.csv` and `DIR/<stem>.json`.

pub mod cache;
pub mod cli;
pub mod config;
pub mod error;
pub mod format;

pub use cli::run;
pub use hardedge_core as numerics;
