use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use haus_core::io::{read_signal_file, write_signal_file};
use haus_core::signal::{lp_norm, make_bandlimited};
use haus_core::{GridSpec, SampledSignal};
use serde_json::Value;

fn haus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haus")).args(args).output().expect("spawn haus")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn bundled_signal() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/test_signal.csv")
}

fn rows(csv: &str) -> Vec<(String, String)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.to_string(), b.to_string())
        })
        .collect()
}

fn rel_l2(a: &SampledSignal, b: &SampledSignal) -> f64 {
    lp_norm(&a.sub(b).unwrap(), 2.0).unwrap() / lp_norm(b, 2.0).unwrap()
}

#[test]
fn check_accepts_power_tail() {
    let o = haus(&["check", "--weight", r#"{"family":"power-tail","p":2}"#]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn check_rejects_out_of_range_parameter() {
    let o = haus(&["check", "--weight", r#"{"family":"power-bump","p":0.6}"#]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p < 1/2"));
}

#[test]
fn check_reports_divergent_first_moment() {
    let o = haus(&["check", "--weight", "riemann-liouville", "--alpha", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let notes = v["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("converges while")));
    assert!(v["l1_phi_a"].is_null());
}

#[test]
fn malformed_weight_json_is_a_config_error() {
    assert_eq!(code(&haus(&["check", "--weight", "{not json"])), 2);
    assert_eq!(code(&haus(&["check", "--weight", "gaussian"])), 2);
    assert_eq!(code(&haus(&["check"])), 2);
}

#[test]
fn multiplier_table_values() {
    let o = haus(&["multiplier", "--weight", "power-tail", "--p", "2", "--x-min", "-2", "--x-max", "2", "--points", "401"]);
    assert_eq!(code(&o), 0);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 401);
    for (x, k) in [("0", "1"), ("0.5", "0.5"), ("1.5", "0")] {
        assert!(r.contains(&(x.into(), k.into())), "missing {x},{k}");
    }
    let o = haus(&["multiplier", "--weight", "adjoint-hardy", "--x-min", "-2", "--x-max", "2", "--points", "401"]);
    assert!(rows(&stdout(&o)).contains(&("2".into(), "0.5".into())));
}

#[test]
fn multiplier_single_point() {
    let o = haus(&["multiplier", "--weight", "power-tail", "--p", "2", "--x-min", "0", "--x-max", "0", "--points", "1"]);
    assert_eq!(stdout(&o), "x,khat\n0,1\n");
}

#[test]
fn multiplier_write_failure_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out.csv");
    let o = haus(&["multiplier", "--weight", "adjoint-hardy", "--output", target.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn multiplier_and_kernel_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("k.svg");
    let csv = dir.path().join("k.csv");
    let o = haus(&[
        "kernel", "--weight", "power-tail", "--p", "2", "--points", "41",
        "--output", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
    let r = rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(r.len(), 41);
    let at_zero: f64 = r.iter().find(|(s, _)| s == "0").unwrap().1.parse().unwrap();
    assert!((at_zero - 0.5 / std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn kernel_skips_singular_origin() {
    let o = haus(&["kernel", "--weight", "riemann-liouville", "--alpha", "1", "--s-min", "-1", "--s-max", "1", "--points", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rows(&stdout(&o)).len(), 2);
}

#[test]
fn unknown_sweep_kind() {
    assert_eq!(code(&haus(&["sweep", "--kind", "bogus", "--weight", "adjoint-hardy"])), 2);
}

#[test]
fn apply_zero_input_gives_zero_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("zero.csv");
    let output = dir.path().join("out.csv");
    write_signal_file(&input, &SampledSignal::zeros(GridSpec::centered(0.25, 64).unwrap())).unwrap();
    let o = haus(&[
        "apply", "--weight", "power-tail", "--p", "2", "--epsilon", "0.3",
        "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(read_signal_file(&output).unwrap().values().iter().all(|v| *v == 0.0));
}

#[test]
fn apply_reproduces_band_limited_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("band.csv");
    let output = dir.path().join("out.csv");
    let f = make_bandlimited(4.0, GridSpec::centered(1.0 / 16.0, 2048).unwrap()).unwrap();
    write_signal_file(&input, &f).unwrap();
    let o = haus(&[
        "apply", "--weight", "riemann-liouville", "--alpha", "1", "--epsilon", "0.1",
        "--input", input.to_str().unwrap(), "--output", output.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(rel_l2(&read_signal_file(&output).unwrap(), &f) <= 1e-6);
}

#[test]
fn apply_paths_agree_on_bundled_signal() {
    let dir = tempfile::tempdir().unwrap();
    let input = bundled_signal();
    let mut outs = Vec::new();
    for path in ["spectral", "convolution"] {
        let out = dir.path().join(format!("{path}.csv"));
        let o = haus(&[
            "apply", "--weight", "power-tail", "--p", "2", "--epsilon", "0.5", "--path", path,
            "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(read_signal_file(&out).unwrap());
    }
    assert!(rel_l2(&outs[1], &outs[0]) <= 1e-3);
}

#[test]
fn apply_direct_is_limited() {
    let input = bundled_signal();
    let input = input.to_str().unwrap();
    let o = haus(&["apply", "--weight", "power-tail", "--p", "2", "--input", input, "--path", "direct"]);
    assert_eq!(code(&o), 2);
    let o = haus(&[
        "apply", "--weight", "power-tail", "--p", "2", "--epsilon", "0.5", "--input", input,
        "--path", "direct", "--at", "-1,0.5",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(rows(&stdout(&o)).len(), 2);
}

#[test]
fn apply_input_errors() {
    assert_eq!(code(&haus(&["apply", "--weight", "adjoint-hardy", "--input", "/nonexistent/in.csv"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,value\n0,1\n1,2\n3,4\n").unwrap();
    assert_eq!(code(&haus(&["apply", "--weight", "adjoint-hardy", "--input", bad.to_str().unwrap()])), 2);
    std::fs::write(&bad, "t,value\n0,1\n1,2\n").unwrap();
    assert_eq!(code(&haus(&["apply", "--weight", "adjoint-hardy", "--input", bad.to_str().unwrap()])), 2);
}

#[test]
fn convergence_sweep_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = haus(&[
        "sweep", "--kind", "convergence", "--weight", "power-tail", "--p", "2", "--sigma", "1",
        "--eps", "1,0.5,0.25,0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625", "--out-dir", out,
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("convergence_summary.csv")).unwrap();
    let rate: f64 = summary
        .lines()
        .find_map(|l| l.strip_prefix("fitted_rate,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((rate - 1.0).abs() <= 0.1);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("convergence.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert!(report["timestamp"].is_string());
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10);
    assert!(dir.path().join("convergence.svg").exists());
}

#[test]
fn hormander_sweep_passes_for_power_tail() {
    let o = haus(&["sweep", "--kind", "hormander", "--weight", "power-tail", "--p", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sup = v["bound_constant"].as_f64().unwrap();
    assert!(sup <= 3.0 / std::f64::consts::PI + 0.05);
}

#[test]
fn failed_criterion_exits_one() {
    let o = haus(&["sweep", "--kind", "rate-conditions", "--weight", "power-tail", "--p", "2", "--sigma", "2"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"weight": {"family": "adjoint-hardy"}, "x_min": 2, "x_max": 2, "points": 1}"#,
    )
    .unwrap();
    let o = haus(&["multiplier", "--weight", "power-tail", "--p", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&o), "x,khat\n2,0.5\n");
    std::fs::write(&cfg, r#"{"weigth": {"family": "adjoint-hardy"}}"#).unwrap();
    assert_eq!(code(&haus(&["check", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&haus(&["check", "--config", "/nonexistent/run.json"])), 3);
}

#[test]
fn tabulated_weight_from_table() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("phi.csv");
    // triangle on [-1, 1] with unit mass
    std::fs::write(&table, "t,phi\n-1,0\n0,1\n1,0\n").unwrap();
    let o = haus(&["check", "--weight", "tabulated", "--table", table.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["integral_phi"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn thread_cap_is_validated() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_haus"))
            .args(["check", "--weight", "adjoint-hardy"])
            .env("HAUS_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1")), 0);
    assert_eq!(code(&run("0")), 0);
    assert_eq!(code(&run("many")), 2);
}

#[test]
fn h1norm_prints_estimate() {
    let o = haus(&["h1norm", "--input", bundled_signal().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
}
