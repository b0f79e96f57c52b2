use std::process::{Command, Output};

use cross_sdp::exactnum::{parse_rational, rat};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cross-sdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_uniform_feasible() {
    let out = run(&["verify-uniform", "--n", "6", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["feasible"], true);
    assert_eq!(v["alpha"], "4/1");
    assert_eq!(v["blocks"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_uniform_out_of_range_is_usage_error() {
    let out = run(&["verify-uniform", "--n", "5", "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn verify_uniform_bad_eps1_is_math_failure() {
    let out = run(&["verify-uniform", "--n", "6", "--k", "3", "--eps1", "10/1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_measure_third_has_point_window() {
    let out = run(&["verify-measure", "--n", "4", "--p", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["eps1"], "0/1");
    assert_eq!(v["eps1_window"]["upper"], "0/1");
}

#[test]
fn bad_p_rejected() {
    assert_eq!(run(&["verify-measure", "--n", "4", "--p", "1/2"]).status.code(), Some(2));
    assert_eq!(run(&["verify-measure", "--n", "4", "--p", "0.3"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--n", "4"]).status.code(), Some(2));
}

#[test]
fn oracle_reports_theorem_match() {
    let out = run(&["oracle", "--uniform", "--n", "7", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["optimum"], "25/1");
    assert_eq!(v["pair_count"], 21);
    assert_eq!(v["matches_theorem"], true);
}

#[test]
fn crosscheck_writes_out_file() {
    let dir = std::env::temp_dir().join(format!("cross-sdp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cc.json");
    let out = run(&[
        "crosscheck", "--measure", "--n", "4", "--p", "1/4", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["oracle_optimum"], "1/256");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn scan_emits_one_line_per_instance() {
    let out = run(&["scan", "--uniform", "--k", "3..4", "--n-extra", "0..2"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0]["n"], 6);
    assert!(lines.iter().all(|l| l["feasible"] == true));
}

#[test]
fn emitted_rationals_round_trip() {
    let out = run(&["emit-cert", "--measure", "--n", "3", "--p", "3/10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let alpha = parse_rational(v["alpha"].as_str().unwrap()).unwrap();
    assert_eq!(alpha, rat(9, 100));
    for b in v["blocks"].as_array().unwrap() {
        let u = parse_rational(b["u"].as_str().unwrap()).unwrap();
        let vv = parse_rational(b["v"].as_str().unwrap()).unwrap();
        assert!(u >= vv.clone() && u >= -vv);
    }
}
