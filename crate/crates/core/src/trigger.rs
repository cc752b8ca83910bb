//! Closed-loop stochastic event trigger.
//!
//! The sensor stays silent with probability φ(e) = exp(−½ eᵀ Y e), where e is
//! the innovation against the estimator's fed-back prediction H x̂_{k|k−1}.

use crate::distributions::SeededRng;
use crate::numerics::SpdFactor;
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerConfig {
    y: Matrix,
}

impl TriggerConfig {
    /// `y` must be SPD.
    pub fn new(y: Matrix) -> Result<Self> {
        SpdFactor::new(&y)?;
        Ok(Self { y })
    }

    /// Y = scale · I_m.
    pub fn isotropic(scale: f64, m: usize) -> Result<Self> {
        Self::new(Matrix::identity(m, m) * scale)
    }

    pub fn weight(&self) -> &Matrix {
        &self.y
    }
}

/// What the estimator receives at one step.
#[derive(Debug, Clone, PartialEq)]
pub enum TriggerOutcome {
    /// γ = 0: nothing arrives, but the silence is itself informative.
    Silent,
    /// γ = 1: the measurement is transmitted.
    Transmitted(Vector),
}

impl TriggerOutcome {
    pub fn gamma(&self) -> u8 {
        match self {
            TriggerOutcome::Silent => 0,
            TriggerOutcome::Transmitted(_) => 1,
        }
    }

    pub fn measurement(&self) -> Option<&Vector> {
        match self {
            TriggerOutcome::Silent => None,
            TriggerOutcome::Transmitted(z) => Some(z),
        }
    }
}

/// P(γ = 0 | e) = exp(−½ eᵀ Y e).
pub fn trigger_probability(e: &Vector, cfg: &TriggerConfig) -> Result<f64> {
    if e.len() != cfg.y.nrows() {
        return Err(Error::Dimension(format!(
            "innovation of length {} with a {}x{} trigger weight",
            e.len(),
            cfg.y.nrows(),
            cfg.y.ncols()
        )));
    }
    Ok((-0.5 * e.dot(&(&cfg.y * e))).exp())
}

/// Draws ζ ~ U[0, 1) and stays silent iff ζ ≤ φ(z − z_pred).
pub fn sensor_decide(
    z: &Vector,
    z_pred: &Vector,
    cfg: &TriggerConfig,
    rng: &mut SeededRng,
) -> Result<TriggerOutcome> {
    let phi = trigger_probability(&(z - z_pred), cfg)?;
    let zeta = rng.uniform();
    Ok(if zeta <= phi {
        TriggerOutcome::Silent
    } else {
        TriggerOutcome::Transmitted(z.clone())
    })
}
