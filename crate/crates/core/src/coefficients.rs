//! Coefficient sequences `(C_j)`: models, seeded realizations with certified
//! tail bounds, `C+`/`C-`, moment-condition checks and truncation orders.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::seed::{self, Stream};

/// Largest order handed out by [`CoefficientModel::default_order`].
pub const MAX_DEFAULT_ORDER: usize = 2000;

/// Uniform amplitude law on `[lo, hi]`; `lo == hi` gives a constant.
/// With `shared` a single draw scales every coefficient, otherwise each
/// coefficient gets its own independent draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Amplitude {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub shared: bool,
}

impl Amplitude {
    pub fn constant(v: f64) -> Self {
        Self {
            lo: v,
            hi: v,
            shared: false,
        }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Self { lo, hi, shared: false }
    }

    pub fn shared(mut self) -> Self {
        self.shared = true;
        self
    }

    fn bound(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * rng.random::<f64>()
        }
    }

    fn signs(&self) -> SignSet {
        SignSet {
            pos: self.hi > 0.0,
            neg: self.lo < 0.0,
        }
    }
}

impl Default for Amplitude {
    fn default() -> Self {
        Self::constant(1.0)
    }
}

/// Sign applied to coefficient `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SignPattern {
    #[default]
    Positive,
    /// `(-1)^j`.
    Alternating,
    /// Independent signs, `+` with the given probability.
    Random(f64),
}

impl SignPattern {
    fn draw<R: Rng>(&self, j: usize, rng: &mut R) -> f64 {
        match *self {
            SignPattern::Positive => 1.0,
            SignPattern::Alternating => {
                if j.is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            SignPattern::Random(p) => {
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Signs reachable at infinitely many indices.
    fn signs(&self) -> SignSet {
        match *self {
            SignPattern::Positive => SignSet { pos: true, neg: false },
            SignPattern::Alternating => SignSet { pos: true, neg: true },
            SignPattern::Random(p) => SignSet {
                pos: p > 0.0,
                neg: p < 1.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SignSet {
    pos: bool,
    neg: bool,
}

impl SignSet {
    fn times(self, o: SignSet) -> SignSet {
        SignSet {
            pos: (self.pos && o.pos) || (self.neg && o.neg),
            neg: (self.pos && o.neg) || (self.neg && o.pos),
        }
    }
}

/// Law of the coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientModel {
    /// Fixed `c_0, …, c_{k-1}`, zero afterwards.
    Deterministic { values: Vec<f64> },
    /// `C_j = s_j A_j rho^j`.
    Geometric {
        rho: f64,
        #[serde(default)]
        amplitude: Amplitude,
        #[serde(default)]
        signs: SignPattern,
    },
    /// `C_j = s_j B_j (j + 1)^(-beta)`.
    Power {
        beta: f64,
        #[serde(default)]
        amplitude: Amplitude,
        #[serde(default)]
        signs: SignPattern,
    },
}

/// What is known about `C_j` for `j` beyond the realized head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBounds {
    /// Lower bound on `inf_{j>J} C_j`; never positive (the tail accumulates at 0).
    pub lo: f64,
    /// Upper bound on `sup_{j>J} C_j`; never negative.
    pub hi: f64,
    /// Bound on `sup_{j>J} |C_j|`.
    pub sup: f64,
    /// Bound on `sum_{j>J} |C_j|`; infinite when the tail is not summable.
    pub sum: f64,
    /// The bounds are the true values (finite deterministic tails).
    pub exact: bool,
}

impl TailBounds {
    pub const ZERO: TailBounds = TailBounds {
        lo: 0.0,
        hi: 0.0,
        sup: 0.0,
        sum: 0.0,
        exact: true,
    };
}

/// A sampled head `c_0, …, c_J` plus certified bounds on the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRealization {
    head: Vec<f64>,
    tail: TailBounds,
}

impl CoefficientRealization {
    pub fn new(head: Vec<f64>, tail: TailBounds) -> Result<Self> {
        if head.is_empty() {
            return domain("a coefficient realization needs at least c_0");
        }
        if head.iter().any(|c| !c.is_finite()) {
            return domain("coefficients must be finite");
        }
        Ok(Self { head, tail })
    }

    /// Finitely many coefficients, zero beyond.
    pub fn exact(head: Vec<f64>) -> Result<Self> {
        Self::new(head, TailBounds::ZERO)
    }

    pub fn head(&self) -> &[f64] {
        &self.head
    }

    pub fn tail(&self) -> TailBounds {
        self.tail
    }

    /// Order `J`: the index of the last stored coefficient.
    pub fn order(&self) -> usize {
        self.head.len() - 1
    }

    /// `(C+, C-)` from the head and tail bounds.
    pub fn c_plus_minus(&self) -> Extremes {
        let head_plus = self.head.iter().fold(0.0f64, |m, &c| m.max(c));
        let head_minus = self.head.iter().fold(0.0f64, |m, &c| m.max(-c));
        let tail_plus = self.tail.hi.max(0.0);
        let tail_minus = (-self.tail.lo).max(0.0);
        Extremes {
            plus: head_plus.max(tail_plus),
            minus: head_minus.max(tail_minus),
            plus_is_bound: !self.tail.exact && tail_plus > head_plus,
            minus_is_bound: !self.tail.exact && tail_minus > head_minus,
        }
    }
}

/// `C+ = max_j (C_j ∨ 0)` and `C- = max_j (-C_j ∨ 0)`. A `*_is_bound` flag
/// marks a value that came from an inexact tail bound rather than a realized coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremes {
    pub plus: f64,
    pub minus: f64,
    pub plus_is_bound: bool,
    pub minus_is_bound: bool,
}

impl Extremes {
    pub fn is_approximate(&self) -> bool {
        self.plus_is_bound || self.minus_is_bound
    }
}

/// Free-function form of [`CoefficientRealization::c_plus_minus`].
pub fn c_plus_minus(real: &CoefficientRealization) -> Extremes {
    real.c_plus_minus()
}

/// Moment conditions on the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `Σ E|C_j|^δ < ∞` for some `δ ∈ (0, α)`.
    Momcondr,
    /// `Σ E|C_j|^γ < ∞` for some `γ ∈ (α, 1)`.
    Mod1,
    /// `Σ E|C_j| < ∞`.
    SumAbs,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Momcondr => "momcondr (sum E|C_j|^delta < inf, delta in (0, alpha))",
            Condition::Mod1 => "mod1 (sum E|C_j|^gamma < inf, gamma in (alpha, 1))",
            Condition::SumAbs => "sum_abs (sum E|C_j| < inf)",
        })
    }
}

/// Outcome of [`check_moment_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub alpha: f64,
    pub delta: f64,
    /// Only defined for `alpha < 1`.
    pub gamma: Option<f64>,
    pub passes_momcondr: bool,
    /// Vacuously true when `alpha ≥ 1`.
    pub passes_mod1: bool,
    pub passes_sum_abs: bool,
    /// Conditions the tail index actually requires.
    pub required: Vec<Condition>,
    pub explanation: String,
}

impl ConditionReport {
    pub fn passes(&self, c: Condition) -> bool {
        match c {
            Condition::Momcondr => self.passes_momcondr,
            Condition::Mod1 => self.passes_mod1,
            Condition::SumAbs => self.passes_sum_abs,
        }
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.required.iter().copied().filter(|&c| !self.passes(c)).collect()
    }

    pub fn satisfied(&self) -> bool {
        self.failed().is_empty()
    }

    /// `Ok` when every required condition holds, otherwise [`Error::ConditionsFailed`].
    pub fn ensure(&self) -> Result<()> {
        let failed = self.failed();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::ConditionsFailed(
                failed.iter().map(|c| format!("{c} at alpha = {}", self.alpha)).collect(),
            ))
        }
    }
}

impl CoefficientModel {
    pub fn deterministic(values: impl Into<Vec<f64>>) -> Self {
        CoefficientModel::Deterministic {
            values: values.into(),
        }
    }

    pub fn geometric(rho: f64, amplitude: Amplitude, signs: SignPattern) -> Self {
        CoefficientModel::Geometric {
            rho,
            amplitude,
            signs,
        }
    }

    pub fn power(beta: f64, amplitude: Amplitude, signs: SignPattern) -> Self {
        CoefficientModel::Power {
            beta,
            amplitude,
            signs,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, CoefficientModel::Deterministic { .. })
    }

    /// Rejects parameters outside the families with closed-form bounds.
    pub fn validate(&self) -> Result<()> {
        let check_amp = |a: &Amplitude| -> Result<()> {
            if !(a.lo.is_finite() && a.hi.is_finite()) {
                return Err(Error::UnsupportedModel(
                    "amplitude support must be a bounded interval".into(),
                ));
            }
            if a.lo > a.hi {
                return domain(format!("amplitude lo {} exceeds hi {}", a.lo, a.hi));
            }
            Ok(())
        };
        let check_signs = |s: &SignPattern| match *s {
            SignPattern::Random(p) if !(0.0..=1.0).contains(&p) => {
                domain(format!("sign probability must lie in [0, 1], got {p}"))
            }
            _ => Ok(()),
        };
        match self {
            CoefficientModel::Deterministic { values } => {
                if values.is_empty() {
                    return domain("deterministic model needs at least one coefficient");
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return domain("deterministic coefficients must be finite");
                }
            }
            CoefficientModel::Geometric {
                rho,
                amplitude,
                signs,
            } => {
                if !(rho.abs() < 1.0) {
                    return Err(Error::UnsupportedModel(format!(
                        "geometric ratio must satisfy |rho| < 1, got {rho}"
                    )));
                }
                check_amp(amplitude)?;
                check_signs(signs)?;
            }
            CoefficientModel::Power {
                beta,
                amplitude,
                signs,
            } => {
                if !(*beta > 0.0 && beta.is_finite()) {
                    return Err(Error::UnsupportedModel(format!(
                        "power decay exponent must be positive, got {beta}"
                    )));
                }
                check_amp(amplitude)?;
                check_signs(signs)?;
            }
        }
        Ok(())
    }

    /// Envelope `e_j` with `|C_j| ≤ M e_j` for random families.
    fn envelope(&self, j: usize) -> f64 {
        match *self {
            CoefficientModel::Deterministic { .. } => unreachable!("deterministic tails are exact"),
            CoefficientModel::Geometric { rho, .. } => rho.abs().powi(j as i32),
            CoefficientModel::Power { beta, .. } => (j as f64 + 1.0).powf(-beta),
        }
    }

    /// Bound on `Σ_{j>order} |C_j|` using the amplitude bound `m`.
    fn tail_sum_bound(&self, order: usize, m: f64) -> f64 {
        if m == 0.0 {
            return 0.0;
        }
        match *self {
            CoefficientModel::Deterministic { ref values } => {
                values.iter().skip(order + 1).map(|v| v.abs()).sum()
            }
            CoefficientModel::Geometric { rho, .. } => {
                m * rho.abs().powi(order as i32 + 1) / (1.0 - rho.abs())
            }
            CoefficientModel::Power { beta, .. } => {
                if beta > 1.0 {
                    // Σ_{k ≥ J+2} k^-β ≤ ∫_{J+1}^∞ x^-β dx
                    m * (order as f64 + 1.0).powf(1.0 - beta) / (beta - 1.0)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn tail_bounds(&self, order: usize, m: f64, signs: SignSet) -> TailBounds {
        if let CoefficientModel::Deterministic { values } = self {
            let rest = values.iter().skip(order + 1);
            return TailBounds {
                lo: rest.clone().fold(0.0f64, |a, &v| a.min(v)),
                hi: rest.clone().fold(0.0f64, |a, &v| a.max(v)),
                sup: rest.clone().fold(0.0f64, |a, &v| a.max(v.abs())),
                sum: rest.map(|v| v.abs()).sum(),
                exact: true,
            };
        }
        let sup = m * self.envelope(order + 1);
        TailBounds {
            lo: if signs.neg { -sup } else { 0.0 },
            hi: if signs.pos { sup } else { 0.0 },
            sup,
            sum: self.tail_sum_bound(order, m),
            exact: sup == 0.0,
        }
    }

    /// Signs that `C_j` can take for infinitely many `j`.
    fn tail_signs(&self, amplitude_signs: SignSet) -> SignSet {
        match *self {
            CoefficientModel::Deterministic { .. } => SignSet { pos: true, neg: true },
            CoefficientModel::Geometric { rho, signs, .. } => {
                let r = SignSet {
                    pos: true,
                    neg: rho < 0.0,
                };
                amplitude_signs.times(signs.signs()).times(r)
            }
            CoefficientModel::Power { signs, .. } => amplitude_signs.times(signs.signs()),
        }
    }

    /// Draws `c_0, …, c_order`. Realizations of increasing order from one seed share their prefix.
    pub fn sample(&self, order: usize, seed: u64) -> Result<CoefficientRealization> {
        self.validate()?;
        let (amplitude, signs) = match self {
            CoefficientModel::Deterministic { values } => {
                let mut head: Vec<f64> = values.iter().copied().take(order + 1).collect();
                head.resize(order + 1, 0.0);
                return CoefficientRealization::new(head, self.tail_bounds(order, 0.0, SignSet { pos: true, neg: true }));
            }
            CoefficientModel::Geometric { amplitude, signs, .. }
            | CoefficientModel::Power { amplitude, signs, .. } => (*amplitude, *signs),
        };
        let mut rng = seed::rng(seed, Stream::Coefficients);
        let shared = amplitude.shared.then(|| amplitude.draw(&mut rng));
        let head = (0..=order)
            .map(|j| {
                let a = shared.unwrap_or_else(|| amplitude.draw(&mut rng));
                let s = signs.draw(j, &mut rng);
                s * a * self.envelope(j)
            })
            .collect();
        // a shared draw pins the amplitude for the whole tail
        let (m, amp_signs) = match shared {
            Some(a) => (a.abs(), SignSet { pos: a > 0.0, neg: a < 0.0 }),
            None => (amplitude.bound(), amplitude.signs()),
        };
        CoefficientRealization::new(head, self.tail_bounds(order, m, self.tail_signs(amp_signs)))
    }

    /// Smallest order `q` whose neglected absolute tail sum is at most `tol`.
    /// Deterministic models return the index of their last nonzero coefficient,
    /// where the tail vanishes.
    pub fn truncation_order(&self, tol: f64) -> Result<usize> {
        self.validate()?;
        if !(tol > 0.0) {
            return domain(format!("tolerance must be positive, got {tol}"));
        }
        let m = match self {
            CoefficientModel::Deterministic { values } => {
                return Ok(values.iter().rposition(|&v| v != 0.0).unwrap_or(0));
            }
            CoefficientModel::Geometric { amplitude, .. }
            | CoefficientModel::Power { amplitude, .. } => amplitude.bound(),
        };
        if m == 0.0 {
            return Ok(0);
        }
        let guess = match *self {
            CoefficientModel::Geometric { rho, .. } => {
                if rho == 0.0 {
                    return Ok(0);
                }
                // m |rho|^(q+1) / (1 - |rho|) ≤ tol
                let r = rho.abs();
                ((tol * (1.0 - r) / m).ln() / r.ln()).ceil() - 1.0
            }
            CoefficientModel::Power { beta, .. } => {
                if beta <= 1.0 {
                    return Err(Error::ConditionsFailed(vec![format!(
                        "{} fails for power decay with beta = {beta} <= 1; the tail is not summable",
                        Condition::SumAbs
                    )]));
                }
                // m (q+1)^(1-beta) / (beta-1) ≤ tol
                (m / (tol * (beta - 1.0))).powf(1.0 / (beta - 1.0)).ceil() - 1.0
            }
            CoefficientModel::Deterministic { .. } => unreachable!(),
        };
        if !(guess < 1e15) {
            return domain(format!("truncation order for tol {tol} is too large to represent"));
        }
        let mut q = guess.max(0.0) as usize;
        while q > 0 && self.tail_sum_bound(q - 1, m) <= tol {
            q -= 1;
        }
        while self.tail_sum_bound(q, m) > tol {
            q += 1;
        }
        Ok(q)
    }

    /// Order used when a realization is needed without an explicit order:
    /// deterministic models use their full length, random families truncate
    /// where the tail sum drops below 1e-15 (capped at [`MAX_DEFAULT_ORDER`]).
    pub fn default_order(&self) -> usize {
        match self {
            CoefficientModel::Deterministic { values } => values.len().max(1) - 1,
            _ => self
                .truncation_order(1e-15)
                .map_or(MAX_DEFAULT_ORDER, |q| q.min(MAX_DEFAULT_ORDER)),
        }
    }
}

/// Free-function form of [`CoefficientModel::sample`].
pub fn sample_coefficients(model: &CoefficientModel, order: usize, seed: u64) -> Result<CoefficientRealization> {
    model.sample(order, seed)
}

/// Free-function form of [`CoefficientModel::truncation_order`].
pub fn truncation_order(model: &CoefficientModel, tol: f64) -> Result<usize> {
    model.truncation_order(tol)
}

/// Witness exponent for the `δ`-moment condition.
pub fn witness_delta(alpha: f64) -> f64 {
    if alpha < 2.0 {
        alpha / 2.0
    } else {
        0.9
    }
}

/// Witness exponent for the `γ`-moment condition (only for `alpha < 1`).
pub fn witness_gamma(alpha: f64) -> Option<f64> {
    (alpha < 1.0).then(|| (alpha + 1.0) / 2.0)
}

/// Evaluates the moment conditions in closed form for the model family.
pub fn check_moment_conditions(model: &CoefficientModel, alpha: f64) -> Result<ConditionReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    model.validate()?;
    let delta = witness_delta(alpha);
    let gamma = witness_gamma(alpha);

    // does Σ_j E|C_j|^s converge?
    let (converges, family): (Box<dyn Fn(f64) -> bool>, String) = match *model {
        CoefficientModel::Deterministic { ref values } => {
            (Box::new(|_| true), format!("deterministic with {} terms: every series is finite", values.len()))
        }
        CoefficientModel::Geometric { rho, .. } => (
            Box::new(|_| true),
            format!("geometric with |rho| = {}: E|C_j|^s <= M^s |rho|^(s j) is summable for every s > 0", rho.abs()),
        ),
        CoefficientModel::Power { beta, amplitude, .. } => {
            let null = amplitude.bound() == 0.0;
            (
                Box::new(move |s: f64| null || beta * s > 1.0),
                format!("power decay with beta = {beta}: E|C_j|^s ~ (j+1)^(-beta s) converges iff beta s > 1"),
            )
        }
    };

    let required = if alpha < 1.0 {
        vec![Condition::Momcondr, Condition::Mod1]
    } else if alpha == 1.0 {
        vec![Condition::Momcondr]
    } else {
        vec![Condition::SumAbs]
    };
    let report = ConditionReport {
        alpha,
        delta,
        gamma,
        passes_momcondr: converges(delta),
        passes_mod1: gamma.is_none_or(&converges),
        passes_sum_abs: converges(1.0),
        explanation: String::new(),
        required,
    };
    let verdicts: Vec<String> = report
        .required
        .iter()
        .map(|&c| format!("{c}: {}", if report.passes(c) { "pass" } else { "FAIL" }))
        .collect();
    Ok(ConditionReport {
        explanation: format!(
            "{family}; delta = {delta}{}; {}",
            gamma.map_or(String::new(), |g| format!(", gamma = {g}")),
            verdicts.join("; ")
        ),
        ..report
    })
}
