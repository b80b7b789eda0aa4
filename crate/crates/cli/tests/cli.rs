use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_extremax"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const FINITE: &str = r#"
[law]
alpha = 1.5
p = 0.5

[model]
kind = "deterministic"
values = [1.0, 0.5, -0.25]

[experiment]
n_grid = [100, 500]
replicates = 50
output = "out"
"#;

const FRECHET: &str = r#"
[law]
alpha = 1.0
p = 1.0

[model]
kind = "deterministic"
values = [1.0]

[experiment]
n_grid = [1000]
replicates = 500
master_seed = 3
output = "out"
"#;

const DIVERGENT: &str = r#"
[law]
alpha = 1.5
p = 0.5

[model]
kind = "power"
beta = 0.9

[experiment]
output = "refused"
"#;

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.toml"), config).unwrap();
    dir
}

fn read_dir_sorted(p: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(p)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn simulate_writes_files() {
    let dir = setup(FINITE);
    let o = run(&["simulate", "--config", "c.toml"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["path_n100.csv", "mn_n100.json", "wn_n500.json", "mn_n500.csv"] {
        assert!(dir.path().join("out").join(name).exists(), "{name}");
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("simulated 2 path(s)"));
}

#[test]
fn simulate_missing_alpha_names_the_key() {
    let dir = setup(&FINITE.replace("alpha = 1.5\n", ""));
    let o = run(&["simulate", "--config", "c.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn simulate_seed_override_is_reproducible() {
    let dir = setup(FINITE);
    for (seed, out) in [("1", "a"), ("1", "b"), ("2", "c")] {
        let o = run(&["simulate", "--config", "c.toml", "--seed", seed, "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let a = read_dir_sorted(&dir.path().join("a"));
    let b = read_dir_sorted(&dir.path().join("b"));
    let c = read_dir_sorted(&dir.path().join("c"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

fn write_step(dir: &Path, name: &str, json: &str) {
    std::fs::write(dir.join(name), json).unwrap();
}

fn metric_value(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Hausdorff distance under the max-norm between densely sampled completed graphs
/// of single-jump indicator functions.
fn grid_hausdorff(a: f64, b: f64, pitch: f64) -> f64 {
    let graph = |s: f64| {
        let mut pts = Vec::new();
        let k = (1.0 / pitch).round() as usize;
        for i in 0..=k {
            let t = i as f64 * pitch;
            pts.push((t, if t < s { 0.0 } else { 1.0 }));
            pts.push((s, i as f64 * pitch));
        }
        pts
    };
    let (ga, gb) = (graph(a), graph(b));
    let directed = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p.0 - q.0).abs().max((p.1 - q.1).abs()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(&ga, &gb).max(directed(&gb, &ga))
}

#[test]
fn metric_identical_and_shifted() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    write_step(p, "f.json", r#"{"initial":0.0,"jumps":[{"t":0.5,"value":1.0}]}"#);
    write_step(p, "g.json", r#"{"initial":0.0,"jumps":[{"t":0.6,"value":1.0}]}"#);

    let o = run(&["metric", "f.json", "f.json", "--metric", "m2"], p);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = metric_value(&o);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
    assert_eq!(v["metric"], "m2");
    assert_eq!(v["certified"], true);

    let pitch = 1.0 / 2000.0;
    let oracle = grid_hausdorff(0.5, 0.6, pitch);
    let o = run(&["metric", "f.json", "g.json", "--metric", "m2", "--tol", "1e-9"], p);
    assert_eq!(code(&o), 0);
    let v = metric_value(&o);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 0.1).abs() <= 1e-9, "{value}");
    assert!((value - oracle).abs() <= 2.0 * pitch, "{value} vs grid {oracle}");
    assert_eq!(v["tol"].as_f64().unwrap(), 1e-9);

    let o = run(&["metric", "f.json", "g.json", "--metric", "uniform"], p);
    assert_eq!(metric_value(&o)["value"].as_f64().unwrap(), 1.0);
    let o = run(&["metric", "f.json", "g.json", "--metric", "m1_monotone"], p);
    assert!((metric_value(&o)["value"].as_f64().unwrap() - 0.1).abs() <= 1e-9);
}

#[test]
fn metric_unknown_name_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_step(dir.path(), "f.json", r#"{"initial":0.0,"jumps":[]}"#);
    let o = run(&["metric", "f.json", "f.json", "--metric", "skorokhod_j1"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn metric_non_monotone_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    write_step(dir.path(), "f.json", r#"{"initial":1.0,"jumps":[{"t":0.3,"value":0.0}]}"#);
    write_step(dir.path(), "g.json", r#"{"initial":0.0,"jumps":[]}"#);
    let o = run(&["metric", "f.json", "g.json", "--metric", "m1_monotone"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nondecreasing"), "{}", stderr(&o));
}

#[test]
fn verify_marginal_passes() {
    let dir = setup(FRECHET);
    let o = run(&["verify", "--config", "c.toml", "--experiment", "marginal"], dir.path());
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), stderr(&o));
    assert!(dir.path().join("out/marginal_report.json").exists());
    assert!(dir.path().join("out/marginal_report.csv").exists());
}

#[test]
fn verify_refuses_divergent_power_model() {
    let dir = setup(DIVERGENT);
    for e in ["marginal", "shrinkage", "truncation", "prop33"] {
        let o = run(&["verify", "--config", "c.toml", "--experiment", e], dir.path());
        assert_eq!(code(&o), 2);
        assert!(stderr(&o).contains("sum_abs"), "{}", stderr(&o));
    }
    assert!(!dir.path().join("refused").exists());
}

#[test]
fn verify_tight_threshold_exits_3_with_report() {
    let dir = setup(&format!("{FINITE}\n[thresholds]\nexceedance_max = -1.0\n"));
    let o = run(&["verify", "--config", "c.toml", "--experiment", "shrinkage"], dir.path());
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/shrinkage_report.json")).unwrap()).unwrap();
    assert_eq!(report["shrinkage"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_unknown_experiment_exits_2() {
    let dir = setup(FINITE);
    let o = run(&["verify", "--config", "c.toml", "--experiment", "bogus"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_output_independent_of_workers() {
    let dir = setup(FINITE);
    for (w, out) in [("1", "w1"), ("3", "w3")] {
        let o = run(&["verify", "--config", "c.toml", "--experiment", "truncation", "--workers", w, "--out", out], dir.path());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let csv = |d: &str| std::fs::read_to_string(dir.path().join(d).join("truncation_report.csv")).unwrap();
    assert_eq!(csv("w1"), csv("w3"));
}
