use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ergseries(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergseries"))
        .current_dir(dir)
        .args(args)
        .env_remove("ERGSERIES_PROBE_EPS")
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_config_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("dichotomy.json"),
        r#"{"schema_version": 1, "experiment": "weier-dichotomy", "seed": 11,
            "params": {"alphas": [0.3, 0.75, 1.2], "samples": 200, "n_max": 50}}"#,
    )
    .unwrap();
    let o = ergseries(dir.path(), &["run", "dichotomy.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("dichotomy.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "alpha,frac_differentiable,frac_inconclusive");
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("0.75,1.0,"));
    let m = manifest(dir.path());
    assert_eq!(m["seed"], 11);
    assert_eq!(m["experiment"], "weier-dichotomy");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["params"]["samples"], 200);
    assert_eq!(m["outputs"][0], "dichotomy.csv");
    assert_eq!(m["tolerances"]["probe_eps"]["source"], "default");
    assert_eq!(m["summary"]["rows"][1]["label"], "differentiable-a.e.");
    assert_eq!(m["summary"]["rows"][2]["label"], "everywhere");
}

#[test]
fn invalid_base_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"schema_version": 1, "experiment": "transfer-decay", "params": {"q": 1}}"#,
    )
    .unwrap();
    let o = ergseries(dir.path(), &["run", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_str(stderr(&o).lines().next().unwrap()).unwrap();
    assert_eq!(err["error"], "schema");
    assert!(err["message"].as_str().unwrap().contains("q >= 2"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("typo.json"),
        r#"{"schema_version": 1, "experiment": "riesz-bounds", "params": {"order": [8]}}"#,
    )
    .unwrap();
    let o = ergseries(dir.path(), &["run", "typo.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("order"));
    std::fs::write(dir.path().join("top.json"), r#"{"schema_version": 1, "experiment": "riesz-bounds", "sed": 1}"#)
        .unwrap();
    assert_eq!(ergseries(dir.path(), &["run", "top.json"]).status.code(), Some(2));
}

#[test]
fn precision_budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergseries(dir.path(), &["weier", "dichotomy", "--alphas", "1.2", "--samples", "10", "--n-max", "80"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("at most 60 steps"));
    let o = ergseries(dir.path(), &["series", "probe", "--x", "0.37", "--n-max", "80"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["weier", "dichotomy", "--alphas", "0.3,0.75", "--samples", "300", "--seed", "5"];
    let mut runs = Vec::new();
    for threads in ["1", "4", "4"] {
        let out = dir.path().join(format!("t{threads}-{}", runs.len()));
        let out_s = out.to_str().unwrap().to_string();
        let mut a: Vec<&str> = args.to_vec();
        a.extend(["--threads", threads, "--out-dir", &out_s]);
        let o = ergseries(dir.path(), &a);
        assert!(o.status.success(), "{}", stderr(&o));
        runs.push(std::fs::read(out.join("dichotomy.csv")).unwrap());
    }
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn coefficient_files_and_headers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("coeffs.txt"), "-9 0.25 0\n-1 0.5 0\n1 0.5 0\n9 0.25 0\n").unwrap();
    let o = ergseries(dir.path(), &["transfer", "decay", "--q", "3", "--f", "coeffs.txt", "--n-max", "5", "--out", "profile.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(header(&dir.path().join("profile.csv")), "n,sup_lower,sup_upper");
    let m = manifest(dir.path());
    assert_eq!(m["inputs"]["f"][0], serde_json::json!([-9, 0.25, 0.0]));

    let o = ergseries(dir.path(), &["riesz", "bounds", "--f", "coeffs.txt", "--orders", "4,8", "--out", "bounds.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(header(&dir.path().join("bounds.csv")), "N,lambda_min,lambda_max");

    let o = ergseries(dir.path(), &["series", "moments", "--p", "4", "--samples", "2000", "--seed", "7", "--out", "moments.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(header(&dir.path().join("moments.csv")), "p,estimate,std_error,bound,passed");

    let o = ergseries(
        dir.path(),
        &["gibbs", "pressure", "--g", "coeffs.txt", "--t-min", "-0.2", "--t-max", "0.2", "--t-step", "0.1", "--grid-size", "81", "--depth", "5", "--out", "pressure.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("pressure.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,P,m_t");
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn classify_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergseries(
        dir.path(),
        &["weier", "classify", "--x", "0.125", "--a", "power:1", "--f-prime", "cos1", "--plot", "out.svg", "--plot-resolution", "200"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("out.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    let m = manifest(dir.path());
    assert_eq!(m["summary"]["verdict"], "differentiable");
    assert_eq!(m["outputs"][1], "out.svg");
}

#[test]
fn env_tolerance_override_is_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_ergseries"))
        .current_dir(dir.path())
        .args(["series", "probe", "--f", "cos1", "--a", "power:2", "--x", "1/8", "--n-max", "40"])
        .env("ERGSERIES_PROBE_EPS", "1e-9")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(dir.path());
    assert_eq!(m["tolerances"]["probe_eps"]["source"], "env");
    assert_eq!(m["summary"]["probe"]["eps"], 1e-9);
    assert_eq!(m["summary"]["verdict"], "converged");
}

#[test]
fn reproduce_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergseries(dir.path(), &["reproduce", "--samples", "300", "--seeds", "1,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let labels: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(labels, ["nowhere", "singular-a.e.", "differentiable-a.e.", "everywhere"]);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(manifest(dir.path())["summary"]["matches_expected"], true);
}

#[test]
fn riesz_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = ergseries(dir.path(), &["riesz", "hls", "--c", "explicit:1,0,-1", "--sigma-steps", "6", "--t-steps", "41"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(manifest(dir.path())["summary"]["verdict"], "violated");
    assert_eq!(header(&dir.path().join("hls.csv")), "sigma,min_abs");
    let o = ergseries(dir.path(), &["riesz", "factor", "--c", "0.5,1.25,0.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("factor.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let o = ergseries(dir.path(), &["riesz", "factor", "--c", "1,0.5,1"]);
    assert_eq!(o.status.code(), Some(2));
}
