//! Scenario configuration, Monte-Carlo runner and run output.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{ScenarioConfig, ScenarioKind};
pub use output::{write_run, write_sweep};
pub use runner::{emit_spectrum_demo, run_scenario, run_trials, sweep, ScenarioReport};
