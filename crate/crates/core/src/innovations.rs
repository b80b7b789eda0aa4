//! Regularly varying innovations with an exact two-sided Pareto law.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::seed::{self, Stream};

/// Law of the innovations: `P(|Z| > x) = (x / scale)^(-alpha)` for `x ≥ scale`,
/// with sign `+` w.p. `p` and `-` w.p. `r = 1 - p`, independent of `|Z|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TailLawSpec", into = "TailLawSpec")]
pub struct TailLaw {
    alpha: f64,
    p: f64,
    r: f64,
    scale: f64,
}

/// Config form of a [`TailLaw`]; `r` is implied.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailLawSpec {
    pub alpha: f64,
    pub p: f64,
    #[serde(default = "unit")]
    pub scale: f64,
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<TailLawSpec> for TailLaw {
    type Error = crate::Error;

    fn try_from(s: TailLawSpec) -> Result<Self> {
        TailLaw::new(s.alpha, s.p, s.scale)
    }
}

impl From<TailLaw> for TailLawSpec {
    fn from(l: TailLaw) -> Self {
        TailLawSpec {
            alpha: l.alpha,
            p: l.p,
            scale: l.scale,
        }
    }
}

impl TailLaw {
    pub fn new(alpha: f64, p: f64, scale: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return domain(format!("tail index alpha must be positive, got {alpha}"));
        }
        if !(0.0..=1.0).contains(&p) {
            return domain(format!("balance p must lie in [0, 1], got {p}"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("scale must be positive, got {scale}"));
        }
        Ok(Self {
            alpha,
            p,
            r: 1.0 - p,
            scale,
        })
    }

    /// Unit-scale law.
    pub fn standard(alpha: f64, p: f64) -> Result<Self> {
        Self::new(alpha, p, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `P(|Z| > x)`.
    pub fn tail_prob(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return domain(format!("tail probability needs x > 0, got {x}"));
        }
        Ok(if x <= self.scale {
            1.0
        } else {
            (x / self.scale).powf(-self.alpha)
        })
    }

    /// `a_n` with `n P(|Z| > a_n) = 1`, i.e. `scale * n^(1/alpha)`.
    pub fn norming_constant(&self, n: u64) -> f64 {
        self.scale * (n.max(1) as f64).powf(1.0 / self.alpha)
    }

    /// Pareto magnitude from a uniform variate on `(0, 1]`.
    #[inline]
    pub(crate) fn magnitude(&self, u: f64) -> f64 {
        self.scale * u.powf(-1.0 / self.alpha)
    }

    /// `count` i.i.d. innovations. Magnitudes and signs come from separate
    /// sub-streams of `seed`, so changing `p` never perturbs the magnitudes.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut mags = seed::rng(seed, Stream::Magnitude);
        let mut signs = seed::rng(seed, Stream::Sign);
        (0..count)
            .map(|_| {
                let m = self.magnitude(seed::open_unit(&mut mags));
                if rand::Rng::random::<f64>(&mut signs) < self.p {
                    m
                } else {
                    -m
                }
            })
            .collect()
    }
}

/// Free-function form of [`TailLaw::sample`].
pub fn sample_innovations(law: &TailLaw, count: usize, seed: u64) -> Vec<f64> {
    law.sample(count, seed)
}
