//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Criteria run sequentially inside a single test so each runtime limit is
//! measured without contention. Seeds are fixed in advance.

use std::time::{Duration, Instant};

use extremax::coefficients::{check_moment_conditions, Condition};
use extremax::harness::{run_marginal_convergence, run_metric_shrinkage, run_truncation_study, ExperimentConfig};
use extremax::limit_process::{default_epsilon, limit_marginal_cdf, phi_split};
use extremax::linear_process::simulate_path;
use extremax::metrics::d_m2;
use extremax::seed::replicate_seed;
use extremax::stats::{ks_test, median};
use extremax::{
    partial_maxima, sample_limit_path, sample_poisson_points, InitialConvention, Amplitude, CoefficientModel, LimitSpec, SignPattern, StepFunction,
    TailLaw,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn criterion(id: u32, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let passed = out.passed && in_time;
    println!(
        "[{}] criterion {id}: {title}: {} (runtime {:.2}s, limit {}s{})",
        if passed { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    passed
}

fn finite_model() -> CoefficientModel {
    CoefficientModel::deterministic([1.0, 0.5, -0.25])
}

fn c1_extremal_sampler() -> Outcome {
    let (alpha, p) = (1.0, 0.7);
    let eps = default_epsilon(alpha);
    let draws: Vec<f64> = (0..10_000u64)
        .map(|k| {
            let pts = sample_poisson_points(alpha, p, eps, 1_000_000 + k).unwrap();
            phi_split(&pts).0.value_at(1.0)
        })
        .collect();
    let ks = ks_test(&draws, |x| if x > 0.0 { (-0.7 / x).exp() } else { 0.0 }).unwrap();
    Outcome {
        passed: ks.p_value >= 0.01,
        detail: format!("KS D={:.4}, p={:.4} (need p >= 0.01)", ks.statistic, ks.p_value),
    }
}

/// Checks the empirical CDF of `M(1)` against the CDF formula on a 20-point grid
/// spanning the central quantiles of a Fréchet law with scale `kappa`.
fn limit_consistency(spec: &LimitSpec, kappa: f64, mc_draws: usize, seed: u64) -> (bool, f64) {
    let n = 10_000u64;
    let draws: Vec<f64> = (0..n).map(|k| sample_limit_path(spec, seed + k).unwrap().value_at(1.0)).collect();
    let mut worst = 0.0f64;
    let mut ok = true;
    for i in 0..20 {
        let u = 0.03 + 0.94 * i as f64 / 19.0;
        let x = (kappa / -u.ln()).powf(1.0 / spec.alpha);
        let f = limit_marginal_cdf(spec, 1.0, x, mc_draws, seed ^ 0xC0FFEE).unwrap().value;
        let emp = draws.iter().filter(|&&v| v <= x).count() as f64 / n as f64;
        let se = (f * (1.0 - f) / n as f64).sqrt();
        let z = (emp - f).abs() / se;
        worst = worst.max(z);
        ok &= z <= 3.0;
    }
    (ok, worst)
}

fn c2_limit_consistency() -> Outcome {
    let law = TailLaw::standard(1.5, 0.5).unwrap();
    let spec = LimitSpec::new(&law, finite_model()).unwrap();
    let kappa = 0.5 + 0.5 * 0.25f64.powf(1.5);
    let (ok1, z1) = limit_consistency(&spec, kappa, 1, 2_000_000);

    let law = TailLaw::standard(1.0, 0.5).unwrap();
    let model = CoefficientModel::geometric(0.5, Amplitude::uniform(0.0, 1.0), SignPattern::Positive);
    let spec = LimitSpec::new(&law, model).unwrap();
    let (ok2, z2) = limit_consistency(&spec, 0.5 * 0.5, 100_000, 3_000_000);
    Outcome {
        passed: ok1 && ok2,
        detail: format!("max |emp-F|/se: deterministic {z1:.2}, geometric-random {z2:.2} (need <= 3)"),
    }
}

fn c3_marginal_convergence() -> Outcome {
    let n_grid = [100usize, 1000, 10_000];
    let mut per_n: Vec<Vec<f64>> = vec![Vec::new(); n_grid.len()];
    // C+ = 1, C- = 0.25: exp(-(p + r 0.25^1.5) x^-1.5)
    let kappa = 0.5 + 0.5 * 0.25f64.powf(1.5);
    let mut kappa_ok = true;
    for master in 1..=10u64 {
        let mut cfg = ExperimentConfig::new(TailLaw::standard(1.5, 0.5).unwrap(), finite_model());
        cfg.experiment.n_grid = n_grid.to_vec();
        cfg.experiment.replicates = 4000;
        cfg.experiment.master_seed = master;
        let report = run_marginal_convergence(&cfg).unwrap();
        kappa_ok &= report.marginal.iter().all(|r| (r.limit_scale - r.t * kappa).abs() < 1e-12);
        for (i, row) in report.marginal.iter().enumerate() {
            per_n[i].push(row.ks_statistic);
        }
    }
    let medians: Vec<f64> = per_n.iter().map(|v| median(v)).collect();
    let worst_last = per_n[2].iter().copied().fold(0.0, f64::max);
    let trend = medians.windows(2).all(|w| w[1] <= w[0]);
    Outcome {
        passed: worst_last < 0.05 && trend && kappa_ok,
        detail: format!(
            "max KS at n=1e4 over seeds {worst_last:.4} (need < 0.05); median KS n=1e2,1e3,1e4: {:.4}, {:.4}, {:.4} (need nonincreasing)",
            medians[0], medians[1], medians[2]
        ),
    }
}

fn c4_core_estimate() -> Outcome {
    let mut cfg = ExperimentConfig::new(TailLaw::standard(1.5, 0.5).unwrap(), finite_model());
    cfg.experiment.n_grid = vec![100, 1000, 10_000];
    cfg.experiment.replicates = 200;
    cfg.experiment.delta = 0.25;
    cfg.experiment.master_seed = 1;
    let report = run_metric_shrinkage(&cfg).unwrap();
    let first = report.shrinkage.first().unwrap().exceedance;
    let last = report.shrinkage.last().unwrap().exceedance;
    Outcome {
        passed: last < 0.05 && last < first,
        detail: format!("P(d>0.25): n=1e2 {first:.3}, n=1e4 {last:.3} (need < 0.05 and strictly below n=1e2)"),
    }
}

fn c5_truncation() -> Outcome {
    let model = CoefficientModel::geometric(0.5, Amplitude::constant(1.0), SignPattern::Positive);
    let mut cfg = ExperimentConfig::new(TailLaw::standard(2.0, 0.5).unwrap(), model);
    cfg.experiment.n_grid = vec![1000];
    cfg.experiment.replicates = 200;
    cfg.experiment.q_grid = vec![2, 20];
    cfg.experiment.master_seed = 1;
    let report = run_truncation_study(&cfg).unwrap();
    let m2 = report.truncation[0].median_distance;
    let m20 = report.truncation[1].median_distance;
    let dominated = report.truncation.iter().all(|r| r.all_dominated);
    Outcome {
        passed: m20 < 1e-4 && m20 < m2 && dominated,
        detail: format!("median d at q=2 {m2:.3e}, q=20 {m20:.3e} (need < 1e-4 and below q=2); bound dominates all: {dominated}"),
    }
}

fn random_step(rng: &mut ChaCha8Rng) -> StepFunction {
    let k = rng.random_range(0..=10);
    let mut ts: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
    ts.sort_by(f64::total_cmp);
    let initial = rng.random_range(-2.0..=2.0);
    StepFunction::new(initial, ts.into_iter().map(|t| (t, rng.random_range(-2.0..=2.0)))).unwrap()
}

/// Points along the completed graph, spaced by arc length, with the pitch used.
fn sample_graph(f: &StepFunction, points: usize) -> (Vec<(f64, f64)>, f64) {
    let mut vertices = vec![(0.0, f.initial())];
    let mut level = f.initial();
    for j in f.jumps() {
        vertices.push((j.t, level));
        vertices.push((j.t, j.value));
        level = j.value;
    }
    vertices.push((1.0, level));
    let length: f64 = vertices.windows(2).map(|w| (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs()).sum();
    let pitch = length / (points - 1) as f64;
    let mut out = Vec::with_capacity(points + vertices.len());
    for w in vertices.windows(2) {
        let len = (w[1].0 - w[0].0).abs() + (w[1].1 - w[0].1).abs();
        let steps = (len / pitch).ceil().max(1.0) as usize;
        for s in 0..steps {
            let a = s as f64 / steps as f64;
            out.push((w[0].0 + a * (w[1].0 - w[0].0), w[0].1 + a * (w[1].1 - w[0].1)));
        }
    }
    out.push(*vertices.last().unwrap());
    (out, pitch)
}

fn brute_hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let directed = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p.0 - q.0).abs().max((p.1 - q.1).abs())).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

fn c6_metric_kernel() -> Outcome {
    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let fs: Vec<StepFunction> = (0..101).map(|_| random_step(&mut rng)).collect();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut oracle_ok = true;
    let mut axioms_ok = true;
    for i in 0..100 {
        let (f, g, h) = (&fs[i], &fs[i + 1], &fs[(i + 37) % 101]);
        let d = d_m2(f, g, tol).unwrap();
        let (sf, pf) = sample_graph(f, 2000);
        let (sg, pg) = sample_graph(g, 2000);
        let oracle = brute_hausdorff(&sf, &sg);
        let allowed = 1e-6f64.max(2.0 * pf.max(pg));
        worst_excess = worst_excess.max((d - oracle).abs() - allowed);
        oracle_ok &= (d - oracle).abs() <= allowed;

        axioms_ok &= d_m2(f, f, tol).unwrap() == 0.0;
        axioms_ok &= d >= 0.0;
        axioms_ok &= (d - d_m2(g, f, tol).unwrap()).abs() <= tol;
        axioms_ok &= d <= d_m2(f, h, tol).unwrap() + d_m2(h, g, tol).unwrap() + 2.0 * tol;
        axioms_ok &= f == g || d > 0.0;
    }
    let a = StepFunction::step(0.5, 0.0, 1.0).unwrap();
    let b = StepFunction::step(0.6, 0.0, 1.0).unwrap();
    let hand = d_m2(&a, &b, tol).unwrap();
    let hand_ok = (hand - 0.1).abs() <= 1e-9;
    Outcome {
        passed: oracle_ok && axioms_ok && hand_ok,
        detail: format!(
            "grid oracle agreement {oracle_ok} (worst margin {worst_excess:.2e}); axioms {axioms_ok}; hand case {hand:.12}"
        ),
    }
}

fn c7_frechet_anchor() -> Outcome {
    let mut cfg = ExperimentConfig::new(TailLaw::standard(1.0, 1.0).unwrap(), CoefficientModel::deterministic([1.0]));
    cfg.experiment.n_grid = vec![10_000];
    cfg.experiment.replicates = 5000;
    cfg.experiment.master_seed = 1;
    let report = run_marginal_convergence(&cfg).unwrap();
    let row = &report.marginal[0];
    let samples: Vec<f64> = (0..cfg.experiment.replicates)
        .map(|k| {
            let s = replicate_seed(cfg.experiment.master_seed, k as u64);
            let real = cfg.model.sample(cfg.order(), s).unwrap();
            let path = simulate_path(&cfg.law, &real, 10_000, s).unwrap();
            partial_maxima(&path, InitialConvention::FirstValue).value_at(1.0)
        })
        .collect();
    let oracle = ks_test(&samples, |x| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 }).unwrap();
    let agree = (oracle.statistic - row.ks_statistic).abs() < 1e-12;
    Outcome {
        passed: oracle.statistic < 0.03 && agree,
        detail: format!(
            "KS D against exp(-1/x)={:.4} (need < 0.03), p={:.3}; harness report agrees: {agree}",
            oracle.statistic, oracle.p_value
        ),
    }
}

fn c8_conditions() -> Outcome {
    let det = check_moment_conditions(&finite_model(), 0.7).unwrap().satisfied()
        && check_moment_conditions(&finite_model(), 1.0).unwrap().satisfied()
        && check_moment_conditions(&finite_model(), 2.5).unwrap().satisfied();
    let power = CoefficientModel::power(0.9, Amplitude::constant(1.0), SignPattern::Positive);
    let rp = check_moment_conditions(&power, 1.5).unwrap();
    let power_fails = rp.failed() == vec![Condition::SumAbs];
    let geo = CoefficientModel::geometric(0.5, Amplitude::uniform(0.0, 1.0), SignPattern::Positive);
    let rg = check_moment_conditions(&geo, 0.5).unwrap();
    let geo_passes = rg.passes(Condition::Momcondr) && rg.passes(Condition::Mod1);
    Outcome {
        passed: det && power_fails && geo_passes,
        detail: format!("deterministic all pass {det}; power(0.9) fails sum_abs {power_fails}; geometric(0.5) momcondr+mod1 {geo_passes}"),
    }
}

#[test]
fn acceptance() {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "extremal sampler exactness", s(10), c1_extremal_sampler),
        criterion(2, "limit-law internal consistency", s(60), c2_limit_consistency),
        criterion(3, "marginal convergence of M_n(1)", s(300), c3_marginal_convergence),
        criterion(4, "metric shrinkage of W_n vs M_n", s(300), c4_core_estimate),
        criterion(5, "truncation coupling", s(120), c5_truncation),
        criterion(6, "metric kernel correctness", s(30), c6_metric_kernel),
        criterion(7, "i.i.d. Fréchet anchor", s(60), c7_frechet_anchor),
        criterion(8, "condition checker ground truth", s(1), c8_conditions),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert!(results.iter().all(|&p| p), "some acceptance criteria failed");
}
