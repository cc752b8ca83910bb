use std::io::Write;

use crate::baselines::{clset_kf_step, kf_oracle_step, KfState};
use crate::distributions::SeededRng;
use crate::etvbf::{etvbf_step, FilterConfig, FilterState};
use crate::model::{simulate_truth, StateSpaceModel};
use crate::trigger::{sensor_decide, TriggerConfig, TriggerOutcome};
use crate::{Error, Matrix, Result, Vector};

use super::config::{ExperimentConfig, FilterId};

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub step: usize,
    pub message: String,
}

/// Per-step log of one Monte Carlo trial. On failure the vectors stop at
/// the last completed step.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub filter: FilterId,
    pub trial_index: u64,
    pub seed: u64,
    pub truth: Vec<Vector>,
    pub estimates: Vec<Vector>,
    pub gamma: Vec<u8>,
    pub iterations: Vec<usize>,
    pub failure: Option<TrialFailure>,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    /// CSV with columns `k,gamma,iterations,x1..xn,xhat1..xhatn`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.truth.first().map_or(0, |x| x.len());
        let mut header = vec!["k".to_string(), "gamma".into(), "iterations".into()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("xhat{i}")));
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.estimates.len() {
            write!(out, "{},{},{}", k + 1, self.gamma[k], self.iterations[k])?;
            for v in self.truth[k].iter().chain(self.estimates[k].iter()) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Anything the closed loop can drive.
enum Estimator {
    Variational {
        cfg: FilterConfig,
        state: FilterState,
    },
    Clset {
        q: Matrix,
        r: Matrix,
        trigger: TriggerConfig,
        state: KfState,
    },
    Oracle {
        state: KfState,
    },
}

impl Estimator {
    fn new(id: FilterId, cfg: &ExperimentConfig, x0: Vector, p0: Matrix) -> Result<Self> {
        Ok(match id {
            FilterId::Etvbf | FilterId::Vbf => {
                let fc = cfg.filter_config()?;
                let state = FilterState::initial(x0, p0, &fc);
                Estimator::Variational { cfg: fc, state }
            }
            FilterId::ClsetKf => Estimator::Clset {
                q: cfg.clset_q(),
                r: cfg.clset_r(),
                trigger: cfg.trigger()?,
                state: KfState { x: x0, p: p0 },
            },
            FilterId::OracleKf => Estimator::Oracle {
                state: KfState { x: x0, p: p0 },
            },
        })
    }

    fn estimate(&self) -> &Vector {
        match self {
            Estimator::Variational { state, .. } => &state.x,
            Estimator::Clset { state, .. } | Estimator::Oracle { state } => &state.x,
        }
    }

    /// Returns the number of fixed-point sweeps (1 for Kalman filters).
    fn step<M: StateSpaceModel + ?Sized>(
        &mut self,
        model: &M,
        k: usize,
        outcome: &TriggerOutcome,
    ) -> Result<usize> {
        let f = model.transition(k);
        let h = model.observation(k);
        match self {
            Estimator::Variational { cfg, state } => {
                let out = etvbf_step(state, &f, &h, outcome, cfg)?;
                *state = out.state;
                Ok(out.diagnostics.iterations)
            }
            Estimator::Clset {
                q,
                r,
                trigger,
                state,
            } => {
                *state = clset_kf_step(state, &f, &h, q, r, trigger, outcome)?;
                Ok(1)
            }
            Estimator::Oracle { state } => {
                let z = outcome.measurement().ok_or_else(|| {
                    Error::InvalidParameter("oracle filter needs every measurement".into())
                })?;
                *state = kf_oracle_step(
                    state,
                    &f,
                    &h,
                    &model.process_cov(k),
                    &model.measurement_cov(k),
                    z,
                )?;
                Ok(1)
            }
        }
    }
}

/// Seed of trial `trial_index`.
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    base_seed.wrapping_add(trial_index)
}

/// Runs one closed-loop trial.
///
/// The truth stream (stream 0 of the trial seed) first draws the initial
/// estimate x̂_{0|0} ~ N(x_0, P̂_{0|0}) and then the whole trajectory, so every
/// filter sees the same truth for a given trial index. Trigger draws come from
/// a separate filter-specific stream. Configuration errors are returned;
/// numerical failures are recorded in the trial.
pub fn run_trial(
    cfg: &ExperimentConfig,
    filter: FilterId,
    trial_index: u64,
) -> Result<TrialRecord> {
    let model = cfg.scenario_model()?;
    run_trial_with_model(cfg, &model, filter, trial_index)
}

/// [`run_trial`] against an arbitrary model of matching dimensions.
pub fn run_trial_with_model<M: StateSpaceModel + ?Sized>(
    cfg: &ExperimentConfig,
    model: &M,
    filter: FilterId,
    trial_index: u64,
) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.base_seed, trial_index);
    let mut truth_rng = SeededRng::with_stream(seed, 0);
    let x0 = cfg.x0();
    let p0 = cfg.p0();
    let x0_hat = truth_rng.gaussian(&x0, &p0)?;
    let traj = simulate_truth(model, &x0, cfg.n_step, &mut truth_rng)?;

    let mut trigger_rng = SeededRng::with_stream(seed, filter.trigger_stream());
    let trigger = cfg.trigger()?;
    let mut est = Estimator::new(filter, cfg, x0_hat, p0)?;

    let mut record = TrialRecord {
        filter,
        trial_index,
        seed,
        truth: Vec::with_capacity(cfg.n_step),
        estimates: Vec::with_capacity(cfg.n_step),
        gamma: Vec::with_capacity(cfg.n_step),
        iterations: Vec::with_capacity(cfg.n_step),
        failure: None,
    };

    for k in 1..=cfg.n_step {
        let z = &traj.measurements[k - 1];
        let outcome = if filter.is_triggered() {
            // Closed loop: the sensor compares against H x̂_{k|k−1} fed back by this estimator.
            let z_pred = model.observation(k) * (model.transition(k) * est.estimate());
            sensor_decide(z, &z_pred, &trigger, &mut trigger_rng)?
        } else {
            TriggerOutcome::Transmitted(z.clone())
        };
        match est.step(model, k, &outcome) {
            Ok(iters) => {
                record.truth.push(traj.states[k - 1].clone());
                record.estimates.push(est.estimate().clone());
                record.gamma.push(outcome.gamma());
                record.iterations.push(iters);
            }
            Err(e) if e.is_numerical_breakdown() => {
                record.failure = Some(TrialFailure {
                    step: k,
                    message: e.at_step(k).to_string(),
                });
                break;
            }
            Err(e) => return Err(e.at_step(k)),
        }
    }
    Ok(record)
}
