//! Remote state estimation for linear-Gaussian systems whose process and
//! measurement noise covariances are unknown and drift over time.
//!
//! The sensor sits behind a closed-loop stochastic event trigger: it only
//! transmits a measurement when the innovation against the estimator's fed-back
//! prediction is "surprising". The estimator ([`etvbf`]) runs a fixed-point
//! variational Bayesian sweep that jointly infers the state, the predicted error
//! covariance (as an inverse-Wishart mixture over nominal process noise
//! covariances) and the measurement noise covariance, using the silence of the
//! sensor as information when no measurement arrives.
//!
//! Module map:
//!
//! * [`numerics`] - Cholesky-based SPD toolkit, block inverse, digamma and log-gamma.
//! * [`distributions`] - inverse-Wishart / Dirichlet / categorical moments and the seeded RNG.
//! * [`model`] - state-space models, the constant-velocity tracking scenario, truth simulation.
//! * [`trigger`] - the stochastic send/no-send decision.
//! * [`etvbf`] - the variational filter.
//! * [`baselines`] - triggered Kalman filter, untriggered VB filter and an oracle Kalman filter.
//! * [`harness`] - Monte Carlo trials, metrics, sweeps and output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod distributions;
pub mod error;
pub mod etvbf;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod trigger;

pub use error::{Error, Result};

/// Dense real matrix used throughout. Dimensions here never exceed 6.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dense real column vector.
pub type Vector = nalgebra::DVector<f64>;
