//! Sampling and distribution functions of the extremal limit
//! `M(t) = C⁽¹⁾ W⁽¹⁾(t) ∨ C⁽²⁾ W⁽²⁾(t)`.
//!
//! `W⁽¹⁾` and `W⁽²⁾` are running maxima of the positive and negative marks of a
//! Poisson process on `[0, 1] × (ℝ \ {0})` with intensity `Leb × μ`, where
//! `μ(dx) = (p 1{x > 0} + r 1{x < 0}) α |x|^{-α-1} dx`. Only marks with
//! `|x| > ε` are generated; `μ{|x| > ε} = ε^{-α}`.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::cadlag::{Jump, StepFunction};
use crate::coefficients::CoefficientModel;
use crate::error::{domain, Result};
use crate::innovations::TailLaw;
use crate::seed::{self, Stream};

/// Points `(t_i, j_i)` of the truncated Poisson process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkedPointSet {
    pub points: Vec<(f64, f64)>,
    pub epsilon: f64,
    pub alpha: f64,
    pub p: f64,
    pub r: f64,
}

impl MarkedPointSet {
    /// `P(no mark exceeds ε in magnitude on [0, 1]) = exp(-ε^{-α})`: the chance that
    /// truncation changes the value at `t = 1`.
    pub fn truncation_miss_prob(&self) -> f64 {
        (-self.epsilon.powf(-self.alpha)).exp()
    }
}

/// Truncation level with `exp(-ε^{-α}) < 1e-40`.
pub fn default_epsilon(alpha: f64) -> f64 {
    (40.0 * std::f64::consts::LN_10).powf(-1.0 / alpha) * (1.0 - 1e-12)
}

/// Draws the points with `|j| > epsilon`: a Poisson(`ε^{-α}`) count, uniform
/// times, Pareto(`α`) magnitudes above `ε`, sign `+` with probability `p`.
pub fn sample_poisson_points(alpha: f64, p: f64, epsilon: f64, seed: u64) -> Result<MarkedPointSet> {
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("balance p must lie in [0, 1], got {p}"));
    }
    if !(epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    let mass = epsilon.powf(-alpha);
    let poisson = Poisson::new(mass).map_err(|e| crate::Error::Domain(format!("poisson mean {mass}: {e}")))?;
    let count = poisson.sample(&mut seed::rng(seed, Stream::PointCount)) as usize;
    let mut rng = seed::rng(seed, Stream::PointMarks);
    let points = (0..count)
        .map(|_| {
            let t = seed::open_unit(&mut rng);
            let m = epsilon * seed::open_unit(&mut rng).powf(-1.0 / alpha);
            let s = if rng.random::<f64>() < p { 1.0 } else { -1.0 };
            (t, s * m)
        })
        .collect();
    Ok(MarkedPointSet {
        points,
        epsilon,
        alpha,
        p,
        r: 1.0 - p,
    })
}

fn running_max_of(mut events: Vec<(f64, f64)>) -> StepFunction {
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = 0.0f64;
    let mut jumps: Vec<Jump> = Vec::new();
    for (t, v) in events {
        if v > best {
            best = v;
            match jumps.last_mut() {
                Some(last) if last.t == t => last.value = v,
                _ => jumps.push(Jump { t, value: v }),
            }
        }
    }
    StepFunction::from_sorted_unchecked(0.0, jumps)
}

/// Running maxima of positive-mark and negative-mark magnitudes (0 before any point).
pub fn phi_split(pts: &MarkedPointSet) -> (StepFunction, StepFunction) {
    let pos = pts.points.iter().filter(|p| p.1 > 0.0).map(|&(t, j)| (t, j)).collect();
    let neg = pts.points.iter().filter(|p| p.1 < 0.0).map(|&(t, j)| (t, -j)).collect();
    (running_max_of(pos), running_max_of(neg))
}

/// Parameters of the limit process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSpec {
    pub alpha: f64,
    pub p: f64,
    pub r: f64,
    pub model: CoefficientModel,
    pub epsilon: f64,
    /// Coefficient order used when drawing `(C⁽¹⁾, C⁽²⁾)`.
    pub order: usize,
}

impl LimitSpec {
    pub fn new(law: &TailLaw, model: CoefficientModel) -> Result<Self> {
        model.validate()?;
        Ok(Self {
            alpha: law.alpha(),
            p: law.p(),
            r: law.r(),
            order: model.default_order(),
            epsilon: default_epsilon(law.alpha()),
            model,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// One draw of `(C⁽¹⁾, C⁽²⁾)`, distributed as `(C+, C-)`.
    pub fn draw_extremes(&self, seed: u64) -> Result<(f64, f64)> {
        let e = self.model.sample(self.order, seed)?.c_plus_minus();
        Ok((e.plus, e.minus))
    }

    /// `p a^α + r b^α`: the exponent-measure weight given `(C⁽¹⁾, C⁽²⁾) = (a, b)`.
    pub fn exponent_weight(&self, a: f64, b: f64) -> f64 {
        self.p * a.powf(self.alpha) + self.r * b.powf(self.alpha)
    }
}

/// One path of `M` on `[0, 1]`.
pub fn sample_limit_path(spec: &LimitSpec, seed: u64) -> Result<StepFunction> {
    let (a, b) = spec.draw_extremes(seed::derive(seed, Stream::LimitCoefficients))?;
    let pts = sample_poisson_points(spec.alpha, spec.p, spec.epsilon, seed::derive(seed, Stream::LimitPoints))?;
    let (w1, w2) = phi_split(&pts);
    Ok(w1.scale(a).pointwise_max(&w2.scale(b)))
}

/// A distribution-function value with its Monte Carlo standard error (0 when exact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: CdfMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CdfMethod {
    ClosedForm,
    MonteCarlo,
}

/// Law of the exponent weight `κ = p C₊^α + r C₋^α`: a point mass for
/// deterministic coefficients, otherwise an empirical sample of it.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalLaw {
    Exact { weight: f64 },
    Mixture { weights: Vec<f64> },
}

impl MarginalLaw {
    /// Deterministic specs use the closed form; others draw `mc_draws` coefficient realizations.
    pub fn new(spec: &LimitSpec, mc_draws: usize, seed: u64) -> Result<Self> {
        if spec.model.is_deterministic() {
            let (a, b) = spec.draw_extremes(0)?;
            return Ok(MarginalLaw::Exact {
                weight: spec.exponent_weight(a, b),
            });
        }
        if mc_draws == 0 {
            return domain("mc_draws must be at least 1");
        }
        let base = seed::derive(seed, Stream::MonteCarlo);
        let weights = (0..mc_draws as u64)
            .map(|k| {
                let (a, b) = spec.draw_extremes(seed::replicate_seed(base, k))?;
                Ok(spec.exponent_weight(a, b))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MarginalLaw::Mixture { weights })
    }

    fn expect(&self, g: impl Fn(f64) -> f64) -> CdfEstimate {
        match self {
            MarginalLaw::Exact { weight } => CdfEstimate {
                value: g(*weight),
                std_error: 0.0,
                method: CdfMethod::ClosedForm,
            },
            MarginalLaw::Mixture { weights } => {
                let n = weights.len() as f64;
                let (mut sum, mut sum_sq) = (0.0, 0.0);
                for &w in weights {
                    let v = g(w);
                    sum += v;
                    sum_sq += v * v;
                }
                let mean = sum / n;
                let var = if weights.len() > 1 {
                    ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
                } else {
                    0.0
                };
                CdfEstimate {
                    value: mean,
                    std_error: (var / n).sqrt(),
                    method: CdfMethod::MonteCarlo,
                }
            }
        }
    }

    /// `P(M(t) ≤ x) = E exp(-t κ x^{-α})`.
    pub fn cdf(&self, alpha: f64, t: f64, x: f64) -> CdfEstimate {
        let xa = x.powf(-alpha);
        self.expect(|w| (-t * w * xa).exp())
    }

    /// `P(M(s) ≤ x, M(t) ≤ y)` for `s ≤ t`.
    pub fn bivariate_cdf(&self, alpha: f64, s: f64, t: f64, x: f64, y: f64) -> CdfEstimate {
        let (xa, ya) = (x.powf(-alpha), y.powf(-alpha));
        if x >= y {
            self.expect(|w| (-t * w * ya).exp())
        } else {
            self.expect(|w| (-s * w * xa - (t - s) * w * ya).exp())
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        domain(format!("time {t} outside [0, 1]"))
    }
}

fn check_level(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        domain(format!("level must be positive, got {x}"))
    }
}

/// `P(M(t) ≤ x)`.
pub fn limit_marginal_cdf(spec: &LimitSpec, t: f64, x: f64, mc_draws: usize, seed: u64) -> Result<CdfEstimate> {
    check_time(t)?;
    check_level(x)?;
    Ok(MarginalLaw::new(spec, mc_draws, seed)?.cdf(spec.alpha, t, x))
}

/// `P(M(s) ≤ x, M(t) ≤ y)`.
#[allow(clippy::too_many_arguments)]
pub fn limit_bivariate_cdf(
    spec: &LimitSpec,
    s: f64,
    t: f64,
    x: f64,
    y: f64,
    mc_draws: usize,
    seed: u64,
) -> Result<CdfEstimate> {
    check_time(s)?;
    check_time(t)?;
    if s > t {
        return domain(format!("need s ≤ t, got s = {s}, t = {t}"));
    }
    check_level(x)?;
    check_level(y)?;
    Ok(MarginalLaw::new(spec, mc_draws, seed)?.bivariate_cdf(spec.alpha, s, t, x, y))
}
