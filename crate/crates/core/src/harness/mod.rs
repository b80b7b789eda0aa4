//! Seeded Monte Carlo experiments checking the convergence of `M_n` and `W_n`.
//!
//! Replicate `k` uses the seed `replicate_seed(master_seed, k)` for both its
//! coefficients and its innovations (on distinct sub-streams). Replicates run
//! on the current rayon pool and are collected in index order, so reports do
//! not depend on scheduling.

mod config;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{Experiment, ExperimentConfig, ExperimentParams, Thresholds};
pub use report::{CheckOutcome, ConvergenceReport, MarginalRow, ShrinkageRow, TruncationRow};

use crate::coefficients::{check_moment_conditions, CoefficientRealization, ConditionReport};
use crate::error::Result;
use crate::limit_process::{LimitSpec, MarginalLaw};
use crate::linear_process::{coupling_bound, finite_order_approx, partial_maxima, simulate_path, wn_process, SimulatedPath};
use crate::metrics::{d_m1_monotone, d_m2};
use crate::seed::{self, Stream};
use crate::stats::{ks_test, median};

use report::CALIBRATION_NOTE;

/// Validates the configuration and the moment conditions without simulating anything.
pub fn preflight(cfg: &ExperimentConfig) -> Result<ConditionReport> {
    cfg.validate()?;
    let report = check_moment_conditions(&cfg.model, cfg.law.alpha())?;
    report.ensure()?;
    Ok(report)
}

/// Runs one experiment.
pub fn run(cfg: &ExperimentConfig, experiment: Experiment) -> Result<ConvergenceReport> {
    match experiment {
        Experiment::Marginal => run_marginal_convergence(cfg),
        Experiment::Shrinkage => run_metric_shrinkage(cfg),
        Experiment::Truncation => run_truncation_study(cfg),
        Experiment::Prop33 => run_proposition33(cfg),
    }
}

/// Runs `experiment` and writes its JSON and CSV reports into the configured
/// output directory. Nothing is written when the configuration is refused.
pub fn run_and_write(cfg: &ExperimentConfig, experiment: Experiment) -> Result<(ConvergenceReport, Vec<PathBuf>)> {
    let report = run(cfg, experiment)?;
    let files = report.write(&cfg.experiment.output)?;
    Ok((report, files))
}

fn replicate(cfg: &ExperimentConfig, n: usize, k: usize) -> Result<(CoefficientRealization, SimulatedPath)> {
    let s = seed::replicate_seed(cfg.experiment.master_seed, k as u64);
    let real = cfg.model.sample(cfg.order(), s)?;
    let path = simulate_path(&cfg.law, &real, n, s)?;
    Ok((real, path))
}

fn par_replicates<T: Send>(cfg: &ExperimentConfig, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..cfg.experiment.replicates).into_par_iter().map(f).collect()
}

fn limit_law(cfg: &ExperimentConfig) -> Result<(LimitSpec, MarginalLaw)> {
    let spec = LimitSpec::new(&cfg.law, cfg.model.clone())?;
    let law = MarginalLaw::new(
        &spec,
        cfg.experiment.mc_draws,
        seed::derive(cfg.experiment.master_seed, Stream::MonteCarlo),
    )?;
    Ok((spec, law))
}

fn limit_scale(law: &MarginalLaw, t: f64) -> f64 {
    match law {
        MarginalLaw::Exact { weight } => t * weight,
        MarginalLaw::Mixture { weights } => {
            let inv = weights.iter().map(|w| 1.0 / w).sum::<f64>() / weights.len() as f64;
            t / inv
        }
    }
}

fn marginal_rows(
    cfg: &ExperimentConfig,
    n: usize,
    samples: &[Vec<f64>],
    spec: &LimitSpec,
    law: &MarginalLaw,
) -> Result<Vec<MarginalRow>> {
    let alpha = spec.alpha;
    cfg.experiment
        .t_grid
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let v: Vec<f64> = samples.iter().map(|s| s[ti]).collect();
            let ks = ks_test(&v, |x| if x > 0.0 { law.cdf(alpha, t, x).value } else { 0.0 })?;
            let fitted_scale = v
                .iter()
                .all(|&x| x > 0.0)
                .then(|| v.len() as f64 / v.iter().map(|x| x.powf(-alpha)).sum::<f64>());
            Ok(MarginalRow {
                n,
                t,
                replicates: v.len(),
                master_seed: cfg.experiment.master_seed,
                ks_statistic: ks.statistic,
                p_value: ks.p_value,
                approximate: ks.approximate,
                degenerate: v.len() < 2,
                fitted_scale,
                limit_scale: limit_scale(law, t),
            })
        })
        .collect()
}

fn finish(
    cfg: &ExperimentConfig,
    experiment: Experiment,
    conditions: ConditionReport,
    started: Instant,
    mut report: ConvergenceReport,
) -> ConvergenceReport {
    report.experiment = experiment;
    report.config = cfg.clone();
    report.conditions = conditions;
    report.coefficient_order = cfg.order();
    report.checks = evaluate_checks(cfg, &report);
    report.note = CALIBRATION_NOTE.to_string();
    report.wall_clock_secs = started.elapsed().as_secs_f64();
    report
}

fn empty_report(cfg: &ExperimentConfig, experiment: Experiment, conditions: &ConditionReport) -> ConvergenceReport {
    ConvergenceReport {
        experiment,
        config: cfg.clone(),
        conditions: conditions.clone(),
        coefficient_order: cfg.order(),
        marginal: Vec::new(),
        shrinkage: Vec::new(),
        truncation: Vec::new(),
        checks: Vec::new(),
        note: String::new(),
        wall_clock_secs: 0.0,
    }
}

/// KS of `M_n(t)` against the limit marginal for every `(n, t)`.
pub fn run_marginal_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let conditions = preflight(cfg)?;
    let started = Instant::now();
    let (spec, law) = limit_law(cfg)?;
    let mut report = empty_report(cfg, Experiment::Marginal, &conditions);
    for &n in &cfg.experiment.n_grid {
        let samples = par_replicates(cfg, |k| {
            let (_, path) = replicate(cfg, n, k)?;
            let m = partial_maxima(&path, cfg.experiment.initial_convention);
            Ok(cfg.experiment.t_grid.iter().map(|&t| m.value_at(t)).collect::<Vec<f64>>())
        })?;
        report.marginal.extend(marginal_rows(cfg, n, &samples, &spec, &law)?);
    }
    Ok(finish(cfg, Experiment::Marginal, conditions, started, report))
}

/// KS of `W_n(t)` against the limit marginal for every `(n, t)`.
pub fn run_proposition33(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let conditions = preflight(cfg)?;
    let started = Instant::now();
    let (spec, law) = limit_law(cfg)?;
    let mut report = empty_report(cfg, Experiment::Prop33, &conditions);
    for &n in &cfg.experiment.n_grid {
        let samples = par_replicates(cfg, |k| {
            let (real, path) = replicate(cfg, n, k)?;
            let e = real.c_plus_minus();
            let w = wn_process(path.current_innovations(), path.a_n, e.plus, e.minus);
            Ok(cfg.experiment.t_grid.iter().map(|&t| w.value_at(t)).collect::<Vec<f64>>())
        })?;
        report.marginal.extend(marginal_rows(cfg, n, &samples, &spec, &law)?);
    }
    Ok(finish(cfg, Experiment::Prop33, conditions, started, report))
}

/// `P(d_M2(W_n, M_n) > δ)` and the median distance for every `n`, with
/// `W_n` and `M_n` built from the same innovations and coefficients.
pub fn run_metric_shrinkage(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let conditions = preflight(cfg)?;
    let started = Instant::now();
    let mut report = empty_report(cfg, Experiment::Shrinkage, &conditions);
    let delta = cfg.experiment.delta;
    for &n in &cfg.experiment.n_grid {
        let d = par_replicates(cfg, |k| {
            let (real, path) = replicate(cfg, n, k)?;
            let e = real.c_plus_minus();
            let w = wn_process(path.current_innovations(), path.a_n, e.plus, e.minus);
            let m = partial_maxima(&path, cfg.experiment.initial_convention);
            d_m2(&w, &m, cfg.experiment.tol)
        })?;
        report.shrinkage.push(ShrinkageRow {
            n,
            replicates: d.len(),
            master_seed: cfg.experiment.master_seed,
            delta,
            exceedance: d.iter().filter(|&&v| v > delta).count() as f64 / d.len() as f64,
            median_distance: median(&d),
            max_distance: d.iter().copied().fold(0.0, f64::max),
        });
    }
    Ok(finish(cfg, Experiment::Shrinkage, conditions, started, report))
}

/// `d*_M1(M_n, M_{n,q})` for every `(n, q)` with `X` and `X^q` sharing innovations.
pub fn run_truncation_study(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let conditions = preflight(cfg)?;
    let started = Instant::now();
    let mut report = empty_report(cfg, Experiment::Truncation, &conditions);
    let q_grid = &cfg.experiment.q_grid;
    let conv = cfg.experiment.initial_convention;
    let tol = cfg.experiment.tol;
    for &n in &cfg.experiment.n_grid {
        // per replicate: (distance, bound) for each q
        let per_rep = par_replicates(cfg, |k| {
            let (real, path) = replicate(cfg, n, k)?;
            let m = partial_maxima(&path, conv);
            q_grid
                .iter()
                .map(|&q| {
                    let approx = finite_order_approx(&real, q)?;
                    let s = seed::replicate_seed(cfg.experiment.master_seed, k as u64);
                    let xq = simulate_path(&cfg.law, &approx, n, s)?;
                    let mq = partial_maxima(&xq, conv);
                    let d = d_m1_monotone(&m, &mq, tol)?;
                    let longer = if xq.order > path.order { &xq } else { &path };
                    let bound = coupling_bound(&real, q, longer)?;
                    Ok((d, bound))
                })
                .collect::<Result<Vec<(f64, f64)>>>()
        })?;
        for (qi, &q) in q_grid.iter().enumerate() {
            let d: Vec<f64> = per_rep.iter().map(|r| r[qi].0).collect();
            let b: Vec<f64> = per_rep.iter().map(|r| r[qi].1).collect();
            report.truncation.push(TruncationRow {
                n,
                q,
                replicates: d.len(),
                master_seed: cfg.experiment.master_seed,
                median_distance: median(&d),
                max_distance: d.iter().copied().fold(0.0, f64::max),
                epsilon: cfg.experiment.epsilon,
                exceedance: d.iter().filter(|&&v| v > cfg.experiment.epsilon).count() as f64 / d.len() as f64,
                median_bound: median(&b),
                all_dominated: d.iter().zip(&b).all(|(&d, &b)| d <= b * (1.0 + 1e-9) + tol),
            });
        }
    }
    Ok(finish(cfg, Experiment::Truncation, conditions, started, report))
}

fn evaluate_checks(cfg: &ExperimentConfig, report: &ConvergenceReport) -> Vec<CheckOutcome> {
    let th = &cfg.thresholds;
    let n_max = *cfg.experiment.n_grid.last().expect("validated nonempty");
    let n_min = cfg.experiment.n_grid[0];
    let mut out = Vec::new();
    let mut check = |name: String, passed: bool, observed: f64, threshold: f64| {
        out.push(CheckOutcome {
            name,
            passed,
            observed,
            threshold,
        })
    };
    for r in report.marginal.iter().filter(|r| r.n == n_max) {
        if let Some(level) = th.ks_level {
            check(format!("ks_p_value(n={}, t={})", r.n, r.t), r.p_value >= level, r.p_value, level);
        }
        if let Some(max) = th.ks_max {
            check(format!("ks_statistic(n={}, t={})", r.n, r.t), r.ks_statistic <= max, r.ks_statistic, max);
        }
    }
    if let (Some(first), Some(last)) = (report.shrinkage.first(), report.shrinkage.last()) {
        if let Some(max) = th.exceedance_max {
            check(format!("exceedance(n={})", last.n), last.exceedance <= max, last.exceedance, max);
        }
        if th.require_trend && n_max > n_min {
            check(
                format!("exceedance_trend(n={} vs n={})", last.n, first.n),
                last.exceedance < first.exceedance || last.exceedance == 0.0,
                last.exceedance,
                first.exceedance,
            );
        }
    }
    for &n in &cfg.experiment.n_grid {
        let rows: Vec<&TruncationRow> = report.truncation.iter().filter(|r| r.n == n).collect();
        let Some(last) = rows.iter().max_by_key(|r| r.q) else { continue };
        check(
            format!("coupling_bound(n={n})"),
            rows.iter().all(|r| r.all_dominated),
            rows.iter().filter(|r| !r.all_dominated).count() as f64,
            0.0,
        );
        if let Some(max) = th.median_max {
            check(format!("median_distance(n={n}, q={})", last.q), last.median_distance <= max, last.median_distance, max);
        }
        if th.require_trend {
            let mut sorted = rows.clone();
            sorted.sort_by_key(|r| r.q);
            let ok = sorted.windows(2).all(|w| w[1].median_distance <= w[0].median_distance);
            check(format!("median_trend_in_q(n={n})"), ok, last.median_distance, sorted[0].median_distance);
        }
    }
    out
}
