use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientModel;
use crate::error::{Error, Result};
use crate::innovations::TailLaw;
use crate::linear_process::InitialConvention;
use crate::metrics::DEFAULT_TOL;

/// Which convergence experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// `M_n(t)` marginals against the limit law.
    Marginal,
    /// `P(d_M2(W_n, M_n) > δ)` as `n` grows.
    Shrinkage,
    /// `d*_M1(M_n, M_{n,q})` as `q` grows.
    Truncation,
    /// `W_n(t)` marginals against the limit law.
    Prop33,
}

impl Experiment {
    pub const ALL: [Experiment; 4] = [
        Experiment::Marginal,
        Experiment::Shrinkage,
        Experiment::Truncation,
        Experiment::Prop33,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Marginal => "marginal",
            Experiment::Shrinkage => "shrinkage",
            Experiment::Truncation => "truncation",
            Experiment::Prop33 => "prop33",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}` (expected marginal, shrinkage, truncation or prop33)")))
    }
}

/// A full experiment description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub law: TailLaw,
    pub model: CoefficientModel,
    #[serde(default)]
    pub experiment: ExperimentParams,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentParams {
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub t_grid: Vec<f64>,
    /// Exceedance threshold for `d_M2(W_n, M_n)`.
    pub delta: f64,
    /// Exceedance threshold for `d*_M1(M_n, M_{n,q})`.
    pub epsilon: f64,
    pub q_grid: Vec<usize>,
    pub master_seed: u64,
    pub output: PathBuf,
    /// Coefficient order `J`; defaults to the model's [`CoefficientModel::default_order`].
    pub coefficient_order: Option<usize>,
    /// Coefficient draws for the limit law of random-coefficient models.
    pub mc_draws: usize,
    pub initial_convention: InitialConvention,
    pub tol: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            n_grid: vec![100, 1000, 10_000],
            replicates: 1000,
            t_grid: vec![1.0],
            delta: 0.25,
            epsilon: 0.25,
            q_grid: vec![2, 5, 10, 20],
            master_seed: 0,
            output: PathBuf::from("out"),
            coefficient_order: None,
            mc_draws: 10_000,
            initial_convention: InitialConvention::FirstValue,
            tol: DEFAULT_TOL,
        }
    }
}

/// Pass/fail thresholds evaluated after a run. These are calibration
/// choices; the limit theorems themselves give no rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Minimum KS p-value at the largest `n` (marginal, prop33).
    pub ks_level: Option<f64>,
    /// Maximum KS statistic at the largest `n` (marginal, prop33).
    pub ks_max: Option<f64>,
    /// Maximum exceedance frequency at the largest `n` (shrinkage).
    pub exceedance_max: Option<f64>,
    /// Maximum median distance at the largest `q` (truncation).
    pub median_max: Option<f64>,
    /// Require the exceedance at the largest `n` to be below the smallest `n`
    /// (shrinkage) and medians nonincreasing in `q` (truncation).
    pub require_trend: bool,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            ks_level: Some(0.01),
            ks_max: None,
            exceedance_max: None,
            median_max: None,
            require_trend: true,
        }
    }
}

impl ExperimentConfig {
    pub fn new(law: TailLaw, model: CoefficientModel) -> Self {
        Self {
            law,
            model,
            experiment: ExperimentParams::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    /// Structural checks; moment conditions are checked separately per experiment.
    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        let bad = |msg: String| Err(Error::Config(msg));
        self.model.validate().map_err(|err| Error::Config(format!("model: {err}")))?;
        if e.n_grid.is_empty() {
            return bad("experiment.n_grid must not be empty".into());
        }
        if e.n_grid[0] == 0 || e.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad(format!("experiment.n_grid must be positive and strictly ascending, got {:?}", e.n_grid));
        }
        if e.replicates == 0 {
            return bad("experiment.replicates must be at least 1".into());
        }
        if e.t_grid.is_empty() || e.t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return bad(format!("experiment.t_grid must be a nonempty list in (0, 1], got {:?}", e.t_grid));
        }
        if !(e.delta > 0.0) {
            return bad(format!("experiment.delta must be positive, got {}", e.delta));
        }
        if !(e.epsilon > 0.0) {
            return bad(format!("experiment.epsilon must be positive, got {}", e.epsilon));
        }
        if e.q_grid.iter().any(|&q| q < 2) {
            return bad(format!("experiment.q_grid entries must be at least 2, got {:?}", e.q_grid));
        }
        if e.mc_draws == 0 {
            return bad("experiment.mc_draws must be at least 1".into());
        }
        if !(e.tol > 0.0) {
            return bad(format!("experiment.tol must be positive, got {}", e.tol));
        }
        Ok(())
    }

    /// Coefficient order `J` used for simulation.
    pub fn order(&self) -> usize {
        self.experiment
            .coefficient_order
            .unwrap_or_else(|| self.model.default_order())
    }
}
