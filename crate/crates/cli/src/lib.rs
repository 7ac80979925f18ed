//! Front end for running cohtherm scenarios from configuration files and
//! figure presets, with an on-disk result cache.

pub mod config;
pub mod error;
pub mod plot;
pub mod preset;
pub mod runner;
pub mod verify;

pub use config::{ConfigLayer, RunConfig, SolverChoice};
pub use error::CliError;
pub use preset::{expand_presets, figure_preset, PresetSpec};
pub use runner::{run, RunReport};

/// Environment variable naming the root directory for relative output paths.
pub const OUTPUT_ROOT_VAR: &str = "COHTHERM_OUT";
