//! Command-line front end for the extremax simulator.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 configuration refusal,
//! 3 verification thresholds failed (reports still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use extremax::harness::{self, Experiment, ExperimentConfig};
use extremax::linear_process::simulate_path;
use extremax::seed::replicate_seed;
use extremax::{d_m1_monotone, d_m2, d_uniform, partial_maxima, wn_process, Error, StepFunction, DEFAULT_TOL};
use serde_json::json;

#[derive(Parser)]
#[command(name = "extremax", version, about = "Partial maxima of heavy-tailed linear processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path per n in the config's n_grid and write CSV/JSON files.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Overrides experiment.master_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides experiment.output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Distance between two step functions stored as JSON.
    Metric {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricName::M2)]
        metric: MetricName,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Run a harness experiment and gate on its thresholds.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        experiment: Experiment,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricName {
    Uniform,
    M2,
    #[value(name = "m1_monotone")]
    M1Monotone,
}

impl MetricName {
    fn as_str(self) -> &'static str {
        match self {
            MetricName::Uniform => "uniform",
            MetricName::M2 => "m2",
            MetricName::M1Monotone => "m1_monotone",
        }
    }
}

enum Failure {
    Runtime(String),
    Refused(String),
    Thresholds(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::ConditionsFailed(_) | Error::UnsupportedModel(_) => Failure::Refused(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { config, seed, out, workers } => {
            with_workers(workers, || simulate(&config, seed, out))
        }
        Command::Metric { first, second, metric, tol } => metric_cmd(&first, &second, metric, tol),
        Command::Verify { config, experiment, seed, out, workers } => {
            with_workers(workers, || verify(&config, experiment, seed, out))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Refused(msg)) => {
            eprintln!("configuration refused: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Thresholds(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}

fn with_workers(workers: Option<usize>, f: impl FnOnce() -> Result<(), Failure> + Send) -> Result<(), Failure> {
    match workers {
        None => f(),
        Some(0) => Err(Failure::Refused("--workers must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Failure::Runtime(e.to_string()))?
            .install(f),
    }
}

fn load(path: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| match e {
        Error::Io(_) => Failure::Refused(format!("{}: {e}", path.display())),
        other => Failure::from(other),
    })?;
    if let Some(s) = seed {
        cfg.experiment.master_seed = s;
    }
    if let Some(o) = out {
        cfg.experiment.output = o;
    }
    Ok(cfg)
}

fn write(path: PathBuf, contents: String) -> Result<(), Failure> {
    std::fs::write(&path, contents).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn simulate(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load(config, seed, out)?;
    harness::preflight(&cfg)?;
    let s = replicate_seed(cfg.experiment.master_seed, 0);
    let real = cfg.model.sample(cfg.order(), s)?;
    let e = real.c_plus_minus();
    let dir = &cfg.experiment.output;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    let mut files = 0;
    for &n in &cfg.experiment.n_grid {
        let path = simulate_path(&cfg.law, &real, n, s)?;
        let m = partial_maxima(&path, cfg.experiment.initial_convention);
        let w = wn_process(path.current_innovations(), path.a_n, e.plus, e.minus);
        write(dir.join(format!("path_n{n}.csv")), path.to_csv())?;
        write(dir.join(format!("mn_n{n}.json")), m.to_json())?;
        write(dir.join(format!("wn_n{n}.json")), w.to_json())?;
        write(dir.join(format!("mn_n{n}.csv")), m.to_csv())?;
        files += 4;
    }
    println!(
        "simulated {} path(s), order J={}, seed {}, C+={} C-={}; wrote {files} files to {}",
        cfg.experiment.n_grid.len(),
        real.order(),
        cfg.experiment.master_seed,
        e.plus,
        e.minus,
        dir.display()
    );
    Ok(())
}

fn read_step(path: &Path) -> Result<StepFunction, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    StepFunction::from_json(&text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn metric_cmd(first: &Path, second: &Path, metric: MetricName, tol: f64) -> Result<(), Failure> {
    let f = read_step(first)?;
    let g = read_step(second)?;
    let value = match metric {
        MetricName::Uniform => d_uniform(&f, &g),
        MetricName::M2 => d_m2(&f, &g, tol).map_err(|e| Failure::Runtime(e.to_string()))?,
        MetricName::M1Monotone => d_m1_monotone(&f, &g, tol).map_err(|e| Failure::Runtime(e.to_string()))?,
    };
    println!("{}", json!({ "metric": metric.as_str(), "value": value, "tol": tol, "certified": true }));
    Ok(())
}

fn verify(config: &Path, experiment: Experiment, seed: Option<u64>, out: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = load(config, seed, out)?;
    let (report, files) = harness::run_and_write(&cfg, experiment)?;
    for c in &report.checks {
        println!(
            "{} {} observed={} threshold={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.threshold
        );
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(Failure::Thresholds(failed.join(", ")))
    }
}
