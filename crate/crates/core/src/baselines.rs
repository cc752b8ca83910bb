//! Comparison estimators driven by the same model and trigger interfaces.

use crate::etvbf::{etvbf_step, FilterConfig, FilterState, StepOutput};
use crate::numerics::{symmetrize, SpdFactor};
use crate::trigger::{TriggerConfig, TriggerOutcome};
use crate::{Matrix, Result, Vector};

/// Mean and covariance of a Kalman-type estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct KfState {
    pub x: Vector,
    pub p: Matrix,
}

fn kalman_update(
    x_pred: &Vector,
    p_pred: &Matrix,
    h: &Matrix,
    r: &Matrix,
    z: &Vector,
) -> Result<KfState> {
    let ph_t = p_pred * h.transpose();
    let innov = SpdFactor::new(&symmetrize(&(h * &ph_t + r)))?;
    let gain = innov.solve(&ph_t.transpose()).transpose();
    let x = x_pred + &gain * (z - h * x_pred);
    let p = symmetrize(&(p_pred - &gain * ph_t.transpose()));
    SpdFactor::new(&p)?;
    Ok(KfState { x, p })
}

/// Closed-loop stochastic event-triggered Kalman filter with fixed nominal
/// covariances. On a silent step the mean is the prediction and the
/// covariance shrinks to P⁻ − P⁻Hᵀ(HP⁻Hᵀ + R̄ + Y⁻¹)⁻¹HP⁻.
pub fn clset_kf_step(
    state: &KfState,
    f: &Matrix,
    h: &Matrix,
    q_nominal: &Matrix,
    r_nominal: &Matrix,
    trigger: &TriggerConfig,
    outcome: &TriggerOutcome,
) -> Result<KfState> {
    let x_pred = f * &state.x;
    let p_pred = symmetrize(&(f * &state.p * f.transpose() + q_nominal));
    match outcome {
        TriggerOutcome::Transmitted(z) => kalman_update(&x_pred, &p_pred, h, r_nominal, z),
        TriggerOutcome::Silent => {
            let y_inv = SpdFactor::new(trigger.weight())?.inverse();
            let ph_t = &p_pred * h.transpose();
            let widened = SpdFactor::new(&symmetrize(&(h * &ph_t + r_nominal + y_inv)))?;
            let p = symmetrize(&(&p_pred - &ph_t * widened.solve(&ph_t.transpose())));
            SpdFactor::new(&p)?;
            Ok(KfState { x: x_pred, p })
        }
    }
}

/// Kalman filter that knows the true Q_k and R_k and receives every measurement.
pub fn kf_oracle_step(
    state: &KfState,
    f: &Matrix,
    h: &Matrix,
    q: &Matrix,
    r: &Matrix,
    z: &Vector,
) -> Result<KfState> {
    let x_pred = f * &state.x;
    let p_pred = symmetrize(&(f * &state.p * f.transpose() + q));
    kalman_update(&x_pred, &p_pred, h, r, z)
}

/// The variational filter with every measurement transmitted.
pub fn vbf_step(
    state: &FilterState,
    f: &Matrix,
    h: &Matrix,
    z: &Vector,
    cfg: &FilterConfig,
) -> Result<StepOutput> {
    etvbf_step(state, f, h, &TriggerOutcome::Transmitted(z.clone()), cfg)
}
