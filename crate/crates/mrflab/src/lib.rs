//! Command-line runner for lattice Markov random field studies.
//!
//! Reads a versioned JSON experiment config (or a named preset), runs
//! samplers, response studies and oracle checks from `mrflab-core`, and
//! writes CSV tables plus a `manifest.json` describing each run.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod presets;

pub use config::ExperimentConfig;
pub use error::CliError;
