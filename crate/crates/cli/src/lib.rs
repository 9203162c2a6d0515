//! Experiment runner for the cxlab laboratory: strict configs, the preset
//! fleet, and report writing.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, Kind};
pub use run::{execute, results_bytes, run, Outcome, RunError};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const INCONCLUSIVE: i32 = 4;
}
