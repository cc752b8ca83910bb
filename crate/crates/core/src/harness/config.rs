use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::etvbf::FilterConfig;
use crate::model::CvScenario;
use crate::trigger::TriggerConfig;
use crate::{Error, Matrix, Result, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterId {
    Etvbf,
    Vbf,
    ClsetKf,
    OracleKf,
}

impl FilterId {
    pub const ALL: [FilterId; 4] = [
        FilterId::Etvbf,
        FilterId::Vbf,
        FilterId::ClsetKf,
        FilterId::OracleKf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FilterId::Etvbf => "etvbf",
            FilterId::Vbf => "vbf",
            FilterId::ClsetKf => "clset-kf",
            FilterId::OracleKf => "oracle-kf",
        }
    }

    /// Whether the sensor runs the event trigger for this estimator.
    pub fn is_triggered(self) -> bool {
        matches!(self, FilterId::Etvbf | FilterId::ClsetKf)
    }

    /// Stream id of the filter-local trigger randomness. Stream 0 is the truth.
    pub(crate) fn trigger_stream(self) -> u64 {
        match self {
            FilterId::Etvbf => 1,
            FilterId::Vbf => 2,
            FilterId::ClsetKf => 3,
            FilterId::OracleKf => 4,
        }
    }
}

impl fmt::Display for FilterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FilterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FilterId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown filter '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// Trigger scale: Y = y·I.
    Y,
    /// Nominal measurement noise scale: R̄₀ = r·I.
    R,
    /// Forgetting factor.
    Rho,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Y => "y",
            SweepParam::R => "r",
            SweepParam::Rho => "rho",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "y" => Ok(SweepParam::Y),
            "r" => Ok(SweepParam::R),
            "rho" => Ok(SweepParam::Rho),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Fast defaults: 50 trials and three-to-five point grids.
    Desk,
    /// 500 trials and the full grids.
    Paper,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::InvalidParameter(format!(
                "unknown profile '{other}'"
            ))),
        }
    }
}

impl Profile {
    pub fn n_mc(self) -> usize {
        match self {
            Profile::Desk => 50,
            Profile::Paper => 500,
        }
    }

    pub fn grid(self, param: SweepParam) -> Vec<f64> {
        match (self, param) {
            (Profile::Desk, SweepParam::Y) => vec![0.0005, 0.005, 0.05],
            (Profile::Desk, SweepParam::R) => vec![10.0, 150.0, 300.0],
            (Profile::Paper, SweepParam::Y) => (1..=200).map(|i| i as f64 * 0.0005).collect(),
            (Profile::Paper, SweepParam::R) => (1..=30).map(|i| i as f64 * 10.0).collect(),
            (_, SweepParam::Rho) => vec![0.92, 0.94, 0.96, 0.98, 1.00],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: SweepParam,
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Sampling period T (s).
    pub period: f64,
    /// Half-period T_f of the noise schedule, in steps.
    pub horizon: f64,
    /// True initial state x_0.
    pub x0: Vec<f64>,
    /// Initial estimate covariance P̂_{0|0} = p0_scale · I.
    pub p0_scale: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            period: 1.0,
            horizon: 500.0,
            x0: vec![100.0, 100.0, 10.0, 10.0],
            p0_scale: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterParams {
    /// Nominal process covariances Q̄_j = scale_j · I.
    pub nominal_q_scales: Vec<f64>,
    pub dof: Vec<f64>,
    pub s0: f64,
    pub alpha0: Vec<f64>,
    pub rho: f64,
    /// Nominal measurement noise scale r, R̄₀ = r·I.
    pub r: f64,
    /// Trigger scale y, Y = y·I.
    pub y: f64,
    pub max_iterations: usize,
    pub delta: f64,
    /// Fixed Q̄ = clset_q_scale · I of the triggered Kalman baseline.
    pub clset_q_scale: f64,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            nominal_q_scales: vec![1.0, 2.0, 3.0, 9.0, 10.0],
            dof: vec![10.0; 5],
            s0: 5.0,
            alpha0: vec![1.0; 5],
            rho: 0.997,
            r: 150.0,
            y: 0.015,
            max_iterations: 50,
            delta: 1e-8,
            clset_q_scale: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub base_seed: u64,
    pub n_mc: usize,
    pub n_step: usize,
    pub filters: Vec<FilterId>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub filter: FilterParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::for_profile(Profile::Desk)
    }
}

impl ExperimentConfig {
    pub fn for_profile(profile: Profile) -> Self {
        Self {
            base_seed: 1,
            n_mc: profile.n_mc(),
            n_step: 150,
            filters: FilterId::ALL.to_vec(),
            sweep: None,
            scenario: ScenarioConfig::default(),
            filter: FilterParams::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_mc == 0 || self.n_step == 0 {
            return bad("n_mc and n_step must be at least 1".into());
        }
        if self.filters.is_empty() {
            return bad("no filters selected".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid.is_empty() {
                return bad("sweep grid is empty".into());
            }
            if let Some(v) = sweep.grid.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return bad(format!("sweep values must be positive, got {v}"));
            }
        }
        if self.scenario.x0.len() != 4 {
            return bad(format!(
                "x0 must have 4 components, got {}",
                self.scenario.x0.len()
            ));
        }
        if !(self.scenario.p0_scale > 0.0) {
            return bad("p0_scale must be positive".into());
        }
        CvScenario::new(self.scenario.period, self.scenario.horizon)?;
        if !(self.filter.clset_q_scale > 0.0) {
            return bad("clset_q_scale must be positive".into());
        }
        self.filter_config()?;
        Ok(())
    }

    /// Copy with the swept parameter set to `value`.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Self {
        let mut cfg = self.clone();
        match param {
            SweepParam::Y => cfg.filter.y = value,
            SweepParam::R => cfg.filter.r = value,
            SweepParam::Rho => cfg.filter.rho = value,
        }
        cfg
    }

    pub fn scenario_model(&self) -> Result<CvScenario> {
        CvScenario::new(self.scenario.period, self.scenario.horizon)
    }

    pub fn x0(&self) -> Vector {
        Vector::from_column_slice(&self.scenario.x0)
    }

    pub fn p0(&self) -> Matrix {
        Matrix::identity(4, 4) * self.scenario.p0_scale
    }

    pub fn trigger(&self) -> Result<TriggerConfig> {
        TriggerConfig::isotropic(self.filter.y, 2)
    }

    pub fn filter_config(&self) -> Result<FilterConfig> {
        let p = &self.filter;
        let cfg = FilterConfig {
            nominal_q: p
                .nominal_q_scales
                .iter()
                .map(|s| Matrix::identity(4, 4) * *s)
                .collect(),
            dof: p.dof.clone(),
            r0: Matrix::identity(2, 2) * p.r,
            s0: p.s0,
            alpha0: p.alpha0.clone(),
            rho: p.rho,
            trigger: self.trigger()?,
            max_iterations: p.max_iterations,
            delta: p.delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn clset_q(&self) -> Matrix {
        Matrix::identity(4, 4) * self.filter.clset_q_scale
    }

    pub fn clset_r(&self) -> Matrix {
        Matrix::identity(2, 2) * self.filter.r
    }
}
