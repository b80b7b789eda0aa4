//! Partial maxima of heavy-tailed linear processes with random coefficients.
//!
//! The crate simulates `M_n(t) = a_n^{-1} max_{i ≤ ⌊nt⌋} X_i` for linear
//! processes `X_i = Σ_j C_j Z_{i-j}` driven by regularly varying innovations,
//! samples the extremal limit `C⁽¹⁾ W⁽¹⁾ ∨ C⁽²⁾ W⁽²⁾` exactly, computes
//! Skorokhod M2 / monotone M1 distances between step functions, and runs
//! seeded Monte Carlo experiments that check the convergence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cadlag;
pub mod coefficients;
pub mod error;
pub mod harness;
pub mod innovations;
pub mod limit_process;
pub mod linear_process;
pub mod metrics;
pub mod seed;
pub mod stats;

pub use cadlag::{CompletedGraph, Jump, StepFunction};
pub use coefficients::{
    check_moment_conditions, Amplitude, CoefficientModel, CoefficientRealization, Condition, ConditionReport,
    Extremes, SignPattern,
};
pub use error::{Error, Result};
pub use innovations::TailLaw;
pub use limit_process::{sample_limit_path, sample_poisson_points, LimitSpec, MarkedPointSet};
pub use linear_process::{partial_maxima, simulate_path, wn_process, InitialConvention, SimulatedPath};
pub use metrics::{d_m1_monotone, d_m2, d_uniform, DEFAULT_TOL};
