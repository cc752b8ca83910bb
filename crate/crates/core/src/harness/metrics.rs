use crate::{Error, Result};

use super::trial::TrialRecord;

/// Aggregates over the successful trials of one (sweep value, filter) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// sqrt of the mean squared error over (trial, step, component).
    pub rmse: f64,
    /// Mean of γ over (trial, step).
    pub comm_rate: f64,
    /// sqrt(comm_rate), the rate as printed in the original study.
    pub comm_rate_paper_sqrt: f64,
    pub mean_iterations: f64,
    pub failures: usize,
}

/// Folds the records in the given order. Failed trials are counted but do
/// not enter the averages; if every trial failed the averages are NaN.
pub fn compute_metrics(records: &[TrialRecord]) -> Result<Metrics> {
    if records.is_empty() {
        return Err(Error::InvalidParameter(
            "no trial records to aggregate".into(),
        ));
    }
    let mut sq_err = 0.0;
    let mut n_err = 0usize;
    let mut sent = 0usize;
    let mut iters = 0usize;
    let mut n_steps = 0usize;
    let mut failures = 0;
    for rec in records {
        if rec.failed() {
            failures += 1;
            continue;
        }
        for (x, xh) in rec.truth.iter().zip(&rec.estimates) {
            sq_err += (xh - x).norm_squared();
            n_err += x.len();
        }
        sent += rec.gamma.iter().map(|&g| g as usize).sum::<usize>();
        iters += rec.iterations.iter().sum::<usize>();
        n_steps += rec.gamma.len();
    }
    let comm_rate = sent as f64 / n_steps as f64;
    Ok(Metrics {
        rmse: (sq_err / n_err as f64).sqrt(),
        comm_rate,
        comm_rate_paper_sqrt: comm_rate.sqrt(),
        mean_iterations: iters as f64 / n_steps as f64,
        failures,
    })
}
