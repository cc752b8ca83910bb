use crate::Result;

use super::config::{ExperimentConfig, FilterId, Sweep, SweepParam};
use super::metrics::compute_metrics;
use super::trial::{run_trial, TrialRecord};

/// One (sweep value, filter) cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub filter: FilterId,
    pub rmse: f64,
    pub comm_rate: f64,
    pub comm_rate_paper_sqrt: f64,
    pub mean_iterations: f64,
    pub failures: usize,
}

/// All trials of one filter, in trial order.
pub fn run_trials(cfg: &ExperimentConfig, filter: FilterId) -> Result<Vec<TrialRecord>> {
    let indices = 0..cfg.n_mc as u64;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        indices
            .into_par_iter()
            .map(|t| run_trial(cfg, filter, t))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        indices.map(|t| run_trial(cfg, filter, t)).collect()
    }
}

/// Runs every filter at every grid value. Without a sweep in the config, a
/// single-point sweep over the configured y is used.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sweep = cfg.sweep.clone().unwrap_or(Sweep {
        param: SweepParam::Y,
        grid: vec![cfg.filter.y],
    });
    let mut rows = Vec::with_capacity(sweep.grid.len() * cfg.filters.len());
    for &value in &sweep.grid {
        let point = cfg.with_param(sweep.param, value);
        for &filter in &cfg.filters {
            let m = compute_metrics(&run_trials(&point, filter)?)?;
            rows.push(SweepRow {
                sweep_value: value,
                filter,
                rmse: m.rmse,
                comm_rate: m.comm_rate,
                comm_rate_paper_sqrt: m.comm_rate_paper_sqrt,
                mean_iterations: m.mean_iterations,
                failures: m.failures,
            });
        }
    }
    Ok(rows)
}

/// [`run_sweep`] on a dedicated pool of `threads` workers.
#[cfg(feature = "parallel")]
pub fn run_sweep_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| crate::Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

/// Fixed y and r, every filter.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let mut point = cfg.clone();
    point.sweep = None;
    run_sweep(&point)
}
