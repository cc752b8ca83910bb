//! Monte Carlo experiment runner for the vehicle-tracking study.
//!
//! Trials are independent and deterministic in `(config, filter, trial index)`,
//! so results do not depend on how many worker threads run them.

pub mod config;
pub mod metrics;
pub mod output;
pub mod sweep;
pub mod trial;

pub use config::{
    ExperimentConfig, FilterId, FilterParams, Profile, ScenarioConfig, Sweep, SweepParam,
};
pub use metrics::{compute_metrics, Metrics};
pub use output::{emit_outputs, rows_to_csv, CSV_HEADER};
#[cfg(feature = "parallel")]
pub use sweep::run_sweep_with_threads;
pub use sweep::{run_compare, run_sweep, run_trials, SweepRow};
pub use trial::{run_trial, run_trial_with_model, trial_seed, TrialFailure, TrialRecord};
