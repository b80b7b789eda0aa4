//! The linear process `X_i = Σ_j C_j Z_{i-j}`, its finite-order approximant,
//! and the normalized step processes built from it.

use serde::{Deserialize, Serialize};

use crate::cadlag::{Jump, StepFunction};
use crate::coefficients::{CoefficientRealization, TailBounds};
use crate::error::{domain, Result};
use crate::innovations::TailLaw;

/// Value of `M_n` on `[0, 1/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialConvention {
    /// `X_1 / a_n`.
    #[default]
    FirstValue,
    /// `0`, the empty-maximum convention.
    Zero,
}

/// One simulated stretch `X_1, …, X_n` with the innovations that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPath {
    pub n: usize,
    pub a_n: f64,
    /// Unnormalized `X_1, …, X_n`.
    pub x: Vec<f64>,
    /// `Z_{1-J}, …, Z_n` in chronological order.
    pub innovations: Vec<f64>,
    /// Coefficient order `J` used for the convolution.
    pub order: usize,
    pub seed: u64,
    /// Bound on `|X_i^{true} - X_i|` from the coefficients beyond `J`:
    /// tail absolute sum times the largest innovation drawn.
    pub neglected_tail_bound: f64,
}

impl SimulatedPath {
    /// `Z_1, …, Z_n`.
    pub fn current_innovations(&self) -> &[f64] {
        &self.innovations[self.order..]
    }

    /// `Z_i` for `1 - J ≤ i ≤ n`.
    pub fn z(&self, i: i64) -> f64 {
        self.innovations[(i - 1 + self.order as i64) as usize]
    }

    /// `i,X_i` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,x\n");
        for (i, x) in self.x.iter().enumerate() {
            out.push_str(&format!("{},{x:?}\n", i + 1));
        }
        out
    }
}

/// `X_i = Σ_{j=0}^{J} c_j Z_{i-j}` for `i = 1..=n`, where `z` holds
/// `Z_{1-J}, …, Z_n` chronologically and `J = coeffs.len() - 1`.
pub fn convolve(coeffs: &[f64], z: &[f64]) -> Vec<f64> {
    let order = coeffs.len() - 1;
    assert!(z.len() > order, "need at least J + 1 innovations");
    let n = z.len() - order;
    (0..n)
        .map(|k| {
            // X_{k+1} uses z[k + J - j]
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * z[k + order - j])
                .sum()
        })
        .collect()
}

/// Reorders a draw stream into chronological `Z_{1-J}, …, Z_n`. The stream
/// yields `Z_1, …, Z_n` first and then `Z_0, Z_{-1}, …`, so paths of the
/// same length share every common innovation regardless of `J`.
fn chronological(stream: &[f64], n: usize, order: usize) -> Vec<f64> {
    let mut z = Vec::with_capacity(n + order);
    z.extend(stream[n..n + order].iter().rev());
    z.extend_from_slice(&stream[..n]);
    z
}

/// Simulates `X_1..X_n` with the realization's head; consumes exactly
/// `n + J` innovations of `seed`.
pub fn simulate_path(law: &TailLaw, real: &CoefficientRealization, n: usize, seed: u64) -> Result<SimulatedPath> {
    if n == 0 {
        return domain("path length n must be at least 1");
    }
    let order = real.order();
    let stream = law.sample(n + order, seed);
    let innovations = chronological(&stream, n, order);
    let x = convolve(real.head(), &innovations);
    let max_z = innovations.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    let tail = real.tail().sum;
    Ok(SimulatedPath {
        n,
        a_n: law.norming_constant(n as u64),
        x,
        innovations,
        order,
        seed,
        neglected_tail_bound: if tail == 0.0 { 0.0 } else { tail * max_z },
    })
}

/// Order-`q` approximant: `c_0, …, c_{q-2}` followed by
/// `max_{j ≥ q-1} c_j` and `min_{j ≥ q-1} c_j`, the tail included through its bounds.
pub fn finite_order_approx(real: &CoefficientRealization, q: usize) -> Result<CoefficientRealization> {
    if q < 2 {
        return domain(format!("approximation order must be at least 2, got {q}"));
    }
    let head = real.head();
    let tail = real.tail();
    let rest = head.get(q - 1..).unwrap_or(&[]);
    let c_max = rest.iter().copied().fold(tail.hi, f64::max);
    let c_min = rest.iter().copied().fold(tail.lo, f64::min);
    let mut out: Vec<f64> = (0..=q - 2).map(|j| head.get(j).copied().unwrap_or(0.0)).collect();
    out.push(c_max);
    out.push(c_min);
    CoefficientRealization::new(out, TailBounds::ZERO)
}

/// `max_i |X_i - X_i^q| / a_n` bounded coefficient by coefficient:
/// `Σ_{j=q-1}^{J} |c_j||Z_{i-j}| + |C^{q,max}||Z_{i-q+1}| + |C^{q,min}||Z_{i-q}|`,
/// maximized over `i`. Requires `q ≤ J` so the approximant reuses the path's innovations.
pub fn coupling_bound(real: &CoefficientRealization, q: usize, path: &SimulatedPath) -> Result<f64> {
    let approx = finite_order_approx(real, q)?;
    if q > path.order {
        return domain(format!("coupling needs q ≤ J = {}, got {q}", path.order));
    }
    let head = real.head();
    let (c_max, c_min) = (approx.head()[q - 1], approx.head()[q]);
    let mut worst = 0.0f64;
    for i in 1..=path.n as i64 {
        let q = q as i64;
        let mut b = c_max.abs() * path.z(i - q + 1).abs() + c_min.abs() * path.z(i - q).abs();
        for (j, c) in head.iter().enumerate().skip((q - 1) as usize) {
            b += c.abs() * path.z(i - j as i64).abs();
        }
        worst = worst.max(b);
    }
    Ok(worst / path.a_n)
}

/// `t ↦ a_n^{-1} max_{i ≤ ⌊nt⌋} x_i` with `[0, 1/n)` set by `convention`.
pub fn partial_maxima_of(x: &[f64], a_n: f64, convention: InitialConvention) -> StepFunction {
    let n = x.len();
    let first = x[0] / a_n;
    let initial = match convention {
        InitialConvention::FirstValue => first,
        InitialConvention::Zero => 0.0,
    };
    let mut jumps = Vec::new();
    if convention == InitialConvention::Zero {
        jumps.push(Jump {
            t: 1.0 / n as f64,
            value: first,
        });
    }
    let mut best = x[0];
    for (k, &v) in x.iter().enumerate().skip(1) {
        if v > best {
            best = v;
            jumps.push(Jump {
                t: (k + 1) as f64 / n as f64,
                value: v / a_n,
            });
        }
    }
    StepFunction::from_sorted_unchecked(initial, jumps)
}

/// `M_n` of a simulated path.
pub fn partial_maxima(path: &SimulatedPath, convention: InitialConvention) -> StepFunction {
    partial_maxima_of(&path.x, path.a_n, convention)
}

/// `W_n(t) = max_{i ≤ ⌊nt⌋} |Z_i| / a_n (C+ 1{Z_i > 0} + C- 1{Z_i < 0})`,
/// zero on `[0, 1/n)`. `z` holds `Z_1..Z_n`.
pub fn wn_process(z: &[f64], a_n: f64, c_plus: f64, c_minus: f64) -> StepFunction {
    let n = z.len();
    let mut best = 0.0f64;
    let mut jumps = Vec::new();
    for (k, &v) in z.iter().enumerate() {
        let w = if v > 0.0 {
            c_plus * v
        } else if v < 0.0 {
            c_minus * -v
        } else {
            0.0
        } / a_n;
        if w > best {
            best = w;
            jumps.push(Jump {
                t: (k + 1) as f64 / n as f64,
                value: w,
            });
        }
    }
    StepFunction::from_sorted_unchecked(0.0, jumps)
}
