//! Inverse-Wishart, Dirichlet and categorical parameter containers with the
//! moments the variational updates need, plus the seeded random source used
//! for simulation and the sensor trigger.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{digamma, log_multivariate_gamma, multivariate_digamma, SpdFactor};
use crate::{Error, Matrix, Result, Vector};

/// IW(P | g, G) over n×n SPD matrices, density
/// |G|^{g/2} |P|^{-(g+n+1)/2} exp(-tr(G P⁻¹)/2) / (2^{gn/2} Γ_n(g/2)).
#[derive(Debug, Clone, PartialEq)]
pub struct InverseWishart {
    dof: f64,
    scale: Matrix,
    factor: SpdFactor,
}

impl InverseWishart {
    pub fn new(dof: f64, scale: Matrix) -> Result<Self> {
        if !(dof > 0.0) || !dof.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "inverse-Wishart dof must be positive, got {dof}"
            )));
        }
        let factor = SpdFactor::new(&scale)?;
        Ok(Self { dof, scale, factor })
    }

    pub fn dim(&self) -> usize {
        self.scale.nrows()
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn scale(&self) -> &Matrix {
        &self.scale
    }

    /// E{P⁻¹} = g G⁻¹.
    pub fn mean_of_inverse(&self) -> Matrix {
        self.factor.inverse() * self.dof
    }

    /// E{log|P|} = log|G| − n log 2 − ψ_n(g/2).
    pub fn expected_log_det(&self) -> Result<f64> {
        let n = self.dim();
        Ok(self.factor.log_det()
            - n as f64 * std::f64::consts::LN_2
            - multivariate_digamma(n, 0.5 * self.dof)?)
    }

    pub fn log_pdf(&self, p: &Matrix) -> Result<f64> {
        if p.shape() != self.scale.shape() {
            return Err(Error::Dimension(format!(
                "inverse-Wishart of dim {} evaluated at {:?}",
                self.dim(),
                p.shape()
            )));
        }
        let n = self.dim() as f64;
        let g = self.dof;
        let pf = SpdFactor::new(p)?;
        let trace = pf.solve(&self.scale).trace();
        Ok(0.5 * g * self.factor.log_det()
            - 0.5 * (g + n + 1.0) * pf.log_det()
            - 0.5 * trace
            - 0.5 * g * n * std::f64::consts::LN_2
            - log_multivariate_gamma(self.dim(), 0.5 * g)?)
    }
}

/// Dirichlet distribution over the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet {
    concentration: Vec<f64>,
}

impl Dirichlet {
    pub fn new(concentration: Vec<f64>) -> Result<Self> {
        if concentration.is_empty() || concentration.iter().any(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet concentration must be nonempty and positive, got {concentration:?}"
            )));
        }
        Ok(Self { concentration })
    }

    pub fn concentration(&self) -> &[f64] {
        &self.concentration
    }

    /// E{log μ_j} = ψ(α_j) − ψ(Σ α).
    pub fn expected_log(&self) -> Vec<f64> {
        let total: f64 = self.concentration.iter().sum();
        // Domain already checked in the constructor.
        let psi_total = digamma(total).expect("positive concentration");
        self.concentration
            .iter()
            .map(|&a| digamma(a).expect("positive concentration") - psi_total)
            .collect()
    }

    pub fn mean(&self) -> CategoricalWeights {
        let total: f64 = self.concentration.iter().sum();
        CategoricalWeights(self.concentration.iter().map(|a| a / total).collect())
    }
}

/// Probability vector on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalWeights(Vec<f64>);

impl CategoricalWeights {
    pub fn uniform(len: usize) -> Self {
        Self(vec![1.0 / len as f64; len])
    }

    /// Normalizes nonnegative weights with a positive sum.
    pub fn proportional(w: &[f64]) -> Self {
        let total: f64 = w.iter().sum();
        debug_assert!(total > 0.0);
        Self(w.iter().map(|v| v / total).collect())
    }

    /// Softmax of `log_w`, computed with the log-sum-exp shift so arguments of
    /// any magnitude are safe.
    pub fn from_log_weights(log_w: &[f64]) -> Result<Self> {
        if log_w.is_empty() || log_w.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::DegenerateWeights);
        }
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::DegenerateWeights);
        }
        let exps: Vec<f64> = log_w.iter().map(|v| (v - max).exp()).collect();
        let total: f64 = exps.iter().sum();
        Ok(Self(exps.into_iter().map(|e| e / total).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Deterministic 64-bit random source.
///
/// Built on ChaCha8 so the stream for a given `(seed, stream)` pair is the
/// same on every platform. Distinct stream ids give independent sequences
/// from one seed.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// mean + L u with L the lower Cholesky factor of `cov` and u standard normal.
    pub fn gaussian(&mut self, mean: &Vector, cov: &Matrix) -> Result<Vector> {
        if cov.nrows() != mean.len() {
            return Err(Error::Dimension(format!(
                "mean of length {} with covariance {:?}",
                mean.len(),
                cov.shape()
            )));
        }
        let factor = SpdFactor::new(cov)?;
        let u = Vector::from_iterator(mean.len(), (0..mean.len()).map(|_| self.standard_normal()));
        Ok(mean + factor.lower() * u)
    }
}
