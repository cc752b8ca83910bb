//! Linear-Gaussian state-space models and ground-truth simulation.
//!
//! x_k = F_k x_{k−1} + ω_k,  z_k = H_k x_k + ν_k,  ω_k ~ N(0, Q_k), ν_k ~ N(0, R_k).

use std::f64::consts::PI;
use std::io::Write;

use crate::distributions::SeededRng;
use crate::{Error, Matrix, Result, Vector};

/// A time-indexed linear-Gaussian system. Every method takes the
/// destination step index k ≥ 1.
pub trait StateSpaceModel: Send + Sync {
    fn state_dim(&self) -> usize;
    fn meas_dim(&self) -> usize;
    fn transition(&self, k: usize) -> Matrix;
    fn observation(&self, k: usize) -> Matrix;
    fn process_cov(&self, k: usize) -> Matrix;
    fn measurement_cov(&self, k: usize) -> Matrix;
}

/// Vehicle tracking with a constant-velocity model in the plane.
///
/// State is (p_x, p_y, v_x, v_y); only positions are measured. The true noise
/// covariances oscillate with period 2·`horizon` steps:
/// Q_k = (6 + 0.5 cos(πk/T_f)) Q₀ and R_k = (100 + 50 cos(πk/T_f)) [[1, .5], [.5, 1]].
#[derive(Debug, Clone, PartialEq)]
pub struct CvScenario {
    /// Sampling period T in seconds.
    pub period: f64,
    /// Cosine schedule half-period T_f in steps.
    pub horizon: f64,
}

impl CvScenario {
    pub fn new(period: f64, horizon: f64) -> Result<Self> {
        if !(period > 0.0) || !(horizon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scenario needs T > 0 and T_f > 0, got T={period}, T_f={horizon}"
            )));
        }
        Ok(Self { period, horizon })
    }

    pub fn process_factor(&self, k: usize) -> f64 {
        6.0 + 0.5 * (PI * k as f64 / self.horizon).cos()
    }

    pub fn measurement_factor(&self, k: usize) -> f64 {
        100.0 + 50.0 * (PI * k as f64 / self.horizon).cos()
    }

    /// Unscaled white-acceleration process covariance block.
    pub fn process_shape(&self) -> Matrix {
        let t = self.period;
        let (a, b, c) = (t.powi(3) / 3.0, t * t / 2.0, t);
        Matrix::from_row_slice(
            4,
            4,
            &[
                a, 0.0, b, 0.0, //
                0.0, a, 0.0, b, //
                b, 0.0, c, 0.0, //
                0.0, b, 0.0, c,
            ],
        )
    }
}

fn measurement_shape() -> Matrix {
    Matrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0])
}

impl StateSpaceModel for CvScenario {
    fn state_dim(&self) -> usize {
        4
    }

    fn meas_dim(&self) -> usize {
        2
    }

    fn transition(&self, _k: usize) -> Matrix {
        let mut f = Matrix::identity(4, 4);
        f[(0, 2)] = self.period;
        f[(1, 3)] = self.period;
        f
    }

    fn observation(&self, _k: usize) -> Matrix {
        Matrix::identity(2, 4)
    }

    fn process_cov(&self, k: usize) -> Matrix {
        self.process_shape() * self.process_factor(k)
    }

    fn measurement_cov(&self, k: usize) -> Matrix {
        measurement_shape() * self.measurement_factor(k)
    }
}

/// The same F, H, Q, R at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeInvariantModel {
    pub f: Matrix,
    pub h: Matrix,
    pub q: Matrix,
    pub r: Matrix,
}

impl TimeInvariantModel {
    pub fn new(f: Matrix, h: Matrix, q: Matrix, r: Matrix) -> Result<Self> {
        let n = f.nrows();
        let m = h.nrows();
        if f.ncols() != n || h.ncols() != n || q.shape() != (n, n) || r.shape() != (m, m) {
            return Err(Error::Dimension(format!(
                "F{:?} H{:?} Q{:?} R{:?}",
                f.shape(),
                h.shape(),
                q.shape(),
                r.shape()
            )));
        }
        Ok(Self { f, h, q, r })
    }

    /// Freezes a model's matrices at step `k`.
    pub fn frozen<M: StateSpaceModel + ?Sized>(model: &M, k: usize) -> Self {
        Self {
            f: model.transition(k),
            h: model.observation(k),
            q: model.process_cov(k),
            r: model.measurement_cov(k),
        }
    }
}

impl StateSpaceModel for TimeInvariantModel {
    fn state_dim(&self) -> usize {
        self.f.nrows()
    }
    fn meas_dim(&self) -> usize {
        self.h.nrows()
    }
    fn transition(&self, _k: usize) -> Matrix {
        self.f.clone()
    }
    fn observation(&self, _k: usize) -> Matrix {
        self.h.clone()
    }
    fn process_cov(&self, _k: usize) -> Matrix {
        self.q.clone()
    }
    fn measurement_cov(&self, _k: usize) -> Matrix {
        self.r.clone()
    }
}

/// Simulated truth. `states[k-1]` and `measurements[k-1]` hold x_k and z_k.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub initial_state: Vector,
    pub states: Vec<Vector>,
    pub measurements: Vec<Vector>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// CSV with columns `k,x1..xn,z1..zm`; a debugging aid.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.initial_state.len();
        let m = self.measurements.first().map_or(0, |z| z.len());
        let mut header = vec!["k".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=m).map(|i| format!("z{i}")));
        writeln!(out, "{}", header.join(","))?;
        for (k, (x, z)) in self.states.iter().zip(&self.measurements).enumerate() {
            write!(out, "{}", k + 1)?;
            for v in x.iter().chain(z.iter()) {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Propagates the truth from the deterministic `x0` for `steps` steps. At each
/// step the process noise is drawn before the measurement noise, both
/// evaluated at the destination index k.
pub fn simulate_truth<M: StateSpaceModel + ?Sized>(
    model: &M,
    x0: &Vector,
    steps: usize,
    rng: &mut SeededRng,
) -> Result<Trajectory> {
    if x0.len() != model.state_dim() {
        return Err(Error::Dimension(format!(
            "initial state of length {} for a {}-state model",
            x0.len(),
            model.state_dim()
        )));
    }
    let n = model.state_dim();
    let m = model.meas_dim();
    let mut states = Vec::with_capacity(steps);
    let mut measurements = Vec::with_capacity(steps);
    let mut x = x0.clone();
    for k in 1..=steps {
        let w = rng.gaussian(&Vector::zeros(n), &model.process_cov(k))?;
        x = model.transition(k) * &x + w;
        let v = rng.gaussian(&Vector::zeros(m), &model.measurement_cov(k))?;
        let z = model.observation(k) * &x + v;
        states.push(x.clone());
        measurements.push(z);
    }
    Ok(Trajectory {
        initial_state: x0.clone(),
        states,
        measurements,
    })
}

/// Initial conditions of the tracking experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDefaults {
    pub x0: Vector,
    pub p0: Matrix,
    pub steps: usize,
}

pub fn scenario_defaults() -> ScenarioDefaults {
    ScenarioDefaults {
        x0: Vector::from_vec(vec![100.0, 100.0, 10.0, 10.0]),
        p0: Matrix::identity(4, 4) * 100.0,
        steps: 150,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::SpdFactor;

    #[test]
    fn cv_matrices_at_step_zero() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        let q = s.process_cov(0);
        assert!((s.process_factor(0) - 6.5).abs() < 1e-15);
        let expect = Matrix::from_row_slice(
            4,
            4,
            &[
                1.0 / 3.0,
                0.0,
                0.5,
                0.0, //
                0.0,
                1.0 / 3.0,
                0.0,
                0.5, //
                0.5,
                0.0,
                1.0,
                0.0, //
                0.0,
                0.5,
                0.0,
                1.0,
            ],
        ) * 6.5;
        assert!((q - expect).norm() < 1e-13);
        let r = s.measurement_cov(0);
        assert!((r - Matrix::from_row_slice(2, 2, &[150.0, 75.0, 75.0, 150.0])).norm() < 1e-12);

        let f = s.transition(1);
        assert_eq!(f[(0, 2)], 1.0);
        assert_eq!(f[(1, 3)], 1.0);
        assert_eq!(f[(2, 0)], 0.0);
        assert_eq!(s.observation(1), Matrix::identity(2, 4));
    }

    #[test]
    fn factors_at_half_period() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        assert!((s.process_factor(500) - 5.5).abs() < 1e-12);
        assert!((s.measurement_factor(500) - 50.0).abs() < 1e-10);
    }

    #[test]
    fn covariances_stay_spd_over_two_half_periods() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        for k in 0..=1000 {
            SpdFactor::new(&s.process_cov(k)).unwrap();
            SpdFactor::new(&s.measurement_cov(k)).unwrap();
        }
    }

    #[test]
    fn rejects_bad_period() {
        assert!(CvScenario::new(0.0, 500.0).is_err());
        assert!(CvScenario::new(1.0, -1.0).is_err());
    }

    #[test]
    fn defaults() {
        let d = scenario_defaults();
        assert_eq!(d.x0.as_slice(), &[100.0, 100.0, 10.0, 10.0]);
        assert_eq!(d.p0, Matrix::identity(4, 4) * 100.0);
        assert_eq!(d.steps, 150);
    }

    fn tiny_noise_model() -> TimeInvariantModel {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        TimeInvariantModel::new(
            s.transition(1),
            s.observation(1),
            Matrix::identity(4, 4) * 1e-300,
            Matrix::identity(2, 2) * 1e-300,
        )
        .unwrap()
    }

    #[test]
    fn zero_noise_limit_matches_deterministic_recursion() {
        let model = tiny_noise_model();
        let x0 = scenario_defaults().x0;
        let traj = simulate_truth(&model, &x0, 40, &mut SeededRng::new(1)).unwrap();
        let mut x = x0.clone();
        for k in 0..40 {
            x = &model.f * &x;
            assert!((&traj.states[k] - &x).norm() < 1e-6);
            assert!((&traj.measurements[k] - &model.h * &x).norm() < 1e-6);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        let x0 = scenario_defaults().x0;
        let a = simulate_truth(&s, &x0, 150, &mut SeededRng::new(8)).unwrap();
        let b = simulate_truth(&s, &x0, 150, &mut SeededRng::new(8)).unwrap();
        assert_eq!(a, b);
        let c = simulate_truth(&s, &x0, 150, &mut SeededRng::new(9)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn first_step_process_noise_covariance() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        let x0 = scenario_defaults().x0;
        let f = s.transition(1);
        let trials = 500;
        let diffs: Vec<Vector> = (0..trials)
            .map(|t| {
                let traj = simulate_truth(&s, &x0, 1, &mut SeededRng::new(1000 + t)).unwrap();
                &traj.states[0] - &f * &x0
            })
            .collect();
        let mean = diffs.iter().fold(Vector::zeros(4), |a, d| a + d) / trials as f64;
        let mut cov = Matrix::zeros(4, 4);
        for d in &diffs {
            let c = d - &mean;
            cov += &c * c.transpose();
        }
        cov /= (trials - 1) as f64;
        let q = s.process_cov(1);
        assert!((cov - &q).norm() / q.norm() < 0.10);
    }

    #[test]
    fn csv_layout() {
        let model = tiny_noise_model();
        let traj =
            simulate_truth(&model, &scenario_defaults().x0, 3, &mut SeededRng::new(1)).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,x1,x2,x3,x4,z1,z2");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[3].split(',').count(), 7);
    }

    #[test]
    fn dimension_mismatch() {
        let s = CvScenario::new(1.0, 500.0).unwrap();
        assert!(simulate_truth(&s, &Vector::zeros(3), 1, &mut SeededRng::new(0)).is_err());
    }
}
