//! End-to-end tests of the `wehrl` binary: oracle values through the CLI surface,
//! exit codes, and byte determinism of reports.

use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex64;
use wehrl::combinatorics::Params;
use wehrl::state_space::PolynomialState;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wehrl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("wehrl-cli-test-{}-{name}", std::process::id()));
    p
}

fn write_state(name: &str, state: &PolynomialState) -> PathBuf {
    let path = temp_path(name);
    std::fs::write(&path, state.to_json()).unwrap();
    path
}

#[test]
fn info_reports_dimension_and_tables() {
    let out = run(&["info", "--N", "1", "--M", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("d = 3"), "{text}");
    assert!(text.contains("(2)"), "index order missing: {text}");

    let json = stdout_json(&run(&["info", "--N", "2", "--M", "2", "--format", "json"]));
    assert_eq!(json["result"]["d"], 6);
    assert_eq!(json["config"]["N"], 2);
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));

    let json = stdout_json(&run(&["info", "--N", "3", "--M", "4", "--format", "json"]));
    assert_eq!(json["result"]["d"], 35);
    assert_eq!(
        json["result"]["index_order"].as_array().unwrap().len(),
        35
    );
}

#[test]
fn usage_errors_exit_with_code_two() {
    for args in [
        vec!["info", "--N", "0", "--M", "2"],
        vec!["hessian", "--N", "1", "--M", "2", "--phi", "pow:0.5"],
        vec!["scan", "--N", "1", "--M", "2", "--sampler", "bogus", "--samples", "1"],
        vec!["scan", "--N", "1", "--M", "2", "--samples", "1", "--format", "text"],
        vec!["verify", "--N", "1", "--M", "2", "--level", "paranoid"],
        vec!["entropy"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn missing_state_file_exits_with_code_three() {
    let out = run(&["entropy", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["distance", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_with_code_three() {
    let out = run(&[
        "info",
        "--N",
        "1",
        "--M",
        "2",
        "--out",
        "/nonexistent/dir/report.txt",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn entropy_of_coherent_state_matches_oracle() {
    let p = Params::new(1, 2).unwrap();
    let state = PolynomialState::coherent_state(&p, &[Complex64::ONE]).unwrap();
    let path = write_state("coherent12.json", &state);
    let json = stdout_json(&run(&[
        "entropy",
        "--state",
        path.to_str().unwrap(),
        "--phi",
        "pow:2",
    ]));
    // Coherent states attain sup G = 1/(pM+1) = 1/5 for Φ = t², N = 1, M = 2.
    let value = json["result"]["value"].as_f64().unwrap();
    assert!((value - 0.2).abs() < 1e-10, "value {value}");
    let deficit = json["result"]["deficit"].as_f64().unwrap();
    assert!(deficit.abs() < 1e-12);
    assert_eq!(json["config"]["phi"], "pow:2");
    assert_eq!(json["config"]["scheme"], "tensor:6:9");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn distance_of_degree_one_state_matches_oracle() {
    let p = Params::new(1, 2).unwrap();
    let state = PolynomialState::basis_state(&p, 1).unwrap();
    let path = write_state("e1.json", &state);
    let json = stdout_json(&run(&["distance", "--state", path.to_str().unwrap()]));
    let t = json["result"]["t_sup"].as_f64().unwrap();
    let dist = json["result"]["dist_geodesic"].as_f64().unwrap();
    assert!((t - 0.5).abs() < 1e-10, "t_sup {t}");
    assert!(
        (dist - std::f64::consts::FRAC_PI_4).abs() < 1e-6,
        "dist {dist}"
    );
    assert_eq!(json["result"]["converged"], true);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn hessian_reports_degree_coefficients() {
    let json = stdout_json(&run(&["hessian", "--N", "1", "--M", "2", "--phi", "pow:2"]));
    let b1 = json["result"]["by_degree"]["1"].as_f64().unwrap();
    let b2 = json["result"]["by_degree"]["2"].as_f64().unwrap();
    assert_eq!(b1, 0.0);
    assert!((b2 + 4.0 / 15.0).abs() < 1e-8, "b2 {b2}");
    assert_eq!(json["result"]["phi"], "pow:2");
}

#[test]
fn scan_reports_are_byte_identical_across_runs_and_threads() {
    let args = [
        "scan", "--N", "1", "--M", "2", "--samples", "20", "--seed", "7", "--format", "csv",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "identical configs must give identical bytes");
    let c = bin().args(args).arg("--threads").arg("2").output().unwrap();
    assert_eq!(a.stdout, c.stdout, "thread count must not change results");

    let text = String::from_utf8_lossy(&a.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed_index,deficit,deficit_stderr,t_sup,d_euclid,dist_geodesic,ratio"
    );
    assert_eq!(lines.count(), 20);

    let json_args = [
        "scan", "--N", "1", "--M", "2", "--samples", "5", "--seed", "3", "--format", "json",
    ];
    let ja = run(&json_args);
    let jb = run(&json_args);
    assert_eq!(ja.stdout, jb.stdout);
    let json: serde_json::Value = serde_json::from_slice(&ja.stdout).unwrap();
    assert_eq!(json["result"]["count"], 5);
    assert!(json["result"]["min_ratio"].as_f64().unwrap() > 0.0);
    assert_eq!(json["config"]["sampler"], "uniform");
}

#[test]
fn near_v_scan_through_cli() {
    let json = stdout_json(&run(&[
        "scan", "--N", "1", "--M", "2", "--sampler", "nearv:0.2", "--samples", "8",
        "--seed", "11", "--format", "json",
    ]));
    assert_eq!(json["config"]["sampler"], "nearv:0.2");
    for sample in json["result"]["samples"].as_array().unwrap() {
        let dist = sample["dist_geodesic"].as_f64().unwrap();
        assert!(dist <= 0.2 + 1e-6, "dist {dist} exceeds the arc bound");
    }
}

#[test]
fn verify_quick_passes_with_exit_zero() {
    let out = run(&["verify", "--N", "1", "--M", "2", "--level", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["result"]["passed"], true);
    assert!(json["result"]["checks"].as_array().unwrap().len() >= 6);
    assert_eq!(json["config"]["level"], "quick");
}

#[test]
fn out_flag_writes_report_file() {
    let path = temp_path("info-out.json");
    let out = run(&[
        "info", "--N", "1", "--M", "3", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["result"]["d"], 4);
    std::fs::remove_file(path).unwrap();
}
