// SPDX-License-Identifier: Apache-2.0
//! End-to-end runs of the `tropvert` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tropvert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropvert")).args(args).env_remove("TROPVERT_SEED").output().unwrap()
}

fn tropvert_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropvert")).args(args).env(key, value).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dir_names(p: &Path) -> Vec<String> {
    let mut v: Vec<String> =
        std::fs::read_dir(p).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn commutator_of_single_lines_has_one_ray() {
    let v = json(&tropvert(&["commutator", "--l1", "1", "--l2", "1", "--order", "8"]));
    let rays = v["rays"].as_array().unwrap();
    assert_eq!(rays.len(), 1);
    assert_eq!(rays[0]["direction"], serde_json::json!([1, 1]));
    assert_eq!(rays[0]["f"], "1 + t1*t2*x*y");
    assert_eq!(rays[0]["coefficients"][1]["c"], "-1/4");
}

#[test]
fn gw_table_contains_eighteen() {
    let out = stdout(&tropvert(&["gw", "--l1", "3", "--l2", "3", "--out", "1,1", "--order", "6"]));
    assert!(out.starts_with("partitions,value\n"));
    assert!(out.lines().any(|l| l == "1+1+1|1+1+1,18"), "{out}");
    assert!(out.lines().any(|l| l == "2+1+0|1+1+1,3"));
}

#[test]
fn graded_gw_with_only_level_one_matches_gw() {
    let plain = stdout(&tropvert(&["gw", "--l1", "2", "--l2", "2", "--order", "4"]));
    let graded = stdout(&tropvert(&["graded-gw", "--line", "1,0:2", "--line", "0,1:2", "--order", "4"]));
    assert_eq!(plain, graded);
}

#[test]
fn bps_of_the_cubic_series() {
    let v = json(&tropvert(&["bps", "--series", "9,63/4,55", "--w", "1"]));
    assert_eq!(v["n"], serde_json::json!(["9", "18", "54"]));
    assert_eq!(v["all_integral"], true);
    assert_eq!(v["round_trip"], true);
}

#[test]
fn graded_bps_is_refused() {
    let o = tropvert(&["bps", "--series", "1,2", "--graded"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn multicover_table() {
    let out = stdout(&tropvert(&["multicover", "--max-d", "4", "--max-r", "2", "--w", "1"]));
    assert!(out.lines().any(|l| l == "R_4,-1/16"));
    assert!(out.lines().any(|l| l == "R^2_3,1/18"));
    assert!(out.lines().any(|l| l == "M_P[4] w=1,-1/16"));
}

#[test]
fn insufficient_order_exits_4_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("gw.csv");
    let o = tropvert(&["gw", "--l1", "3", "--l2", "3", "--order", "4", "--partition", "2+1+0|1+1+1", "-o", path(&target)]);
    assert_eq!(o.status.code(), Some(4));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("at least 6"), "{err}");
    assert!(dir_names(dir.path()).is_empty());

    let o = tropvert(&["commutator", "--l1", "2", "--l2", "2", "--order", "5", "--direction", "1,1", "--max-k", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("at least 6"));
}

#[test]
fn schema_violations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"command":"gw","l1":3,"l2":3,"order":6,"colour":"red"}"#).unwrap();
    assert_eq!(tropvert(&["run", path(&cfg)]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"command":"gw","l1":3,"l2":3,"order":0}"#).unwrap();
    assert_eq!(tropvert(&["run", path(&cfg)]).status.code(), Some(2));
    std::fs::write(&cfg, "not json").unwrap();
    assert_eq!(tropvert(&["run", path(&cfg)]).status.code(), Some(2));
    assert_eq!(tropvert(&["gw", "--l1", "3"]).status.code(), Some(2));
    let o = tropvert_env(&["tropical-count", "--line", "1,0:1", "--line", "0,1:1"], "TROPVERT_SEED", "seven");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_run_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("gw.csv");
    let body = serde_json::json!({
        "command": "gw", "l1": 2, "l2": 2, "out": [1, 1], "order": 4, "output": path(&out)
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    stdout(&tropvert(&["run", path(&cfg)]));
    let via_flags = stdout(&tropvert(&["gw", "--l1", "2", "--l2", "2", "--order", "4"]));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), via_flags);
    assert_eq!(dir_names(dir.path()), ["c.json", "gw.csv"]);
}

#[test]
fn config_switches_derive_artifact_paths() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("count.json");
    let body = serde_json::json!({
        "command": "tropical-count",
        "lines": ["1,0:1,1", {"direction": [0, 1], "weights": [2]}],
        "seed": 3,
        "output": path(&out),
        "emit_curves": true,
        "emit_svg": true
    });
    std::fs::write(&cfg, body.to_string()).unwrap();
    stdout(&tropvert(&["run", path(&cfg)]));
    assert_eq!(dir_names(dir.path()), ["c.json", "count.curves.json", "count.json", "count.svg"]);
    let curves: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("count.curves.json")).unwrap()).unwrap();
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(curves["ntrop"], summary["ntrop"]);
    for c in curves["curves"].as_array().unwrap() {
        assert!(c["mult"].as_u64().unwrap() >= 1);
        assert!(c["edges"].as_array().unwrap().iter().all(|e| e["w"].as_u64().unwrap() >= 1));
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["tropical-count", "--line", "1,0:1,1", "--line", "0,1:1,1", "--seed", "4"];
    assert_eq!(stdout(&tropvert(&args)), stdout(&tropvert(&args)));
    let args = ["commutator", "--l1", "2", "--l2", "3", "--order", "6"];
    assert_eq!(stdout(&tropvert(&args)), stdout(&tropvert(&args)));
    let args = ["verify", "--l1", "2", "--l2", "1", "--order", "4"];
    assert_eq!(stdout(&tropvert(&args)), stdout(&tropvert(&args)));
}

#[test]
fn seed_environment_overrides_config() {
    let base = ["tropical-count", "--line", "1,0:1,2", "--line", "0,1:1,1"];
    let explicit: Vec<&str> = base.iter().copied().chain(["--seed", "7"]).collect();
    let overridden: Vec<&str> = base.iter().copied().chain(["--seed", "1"]).collect();
    let a = stdout(&tropvert(&explicit));
    let b = stdout(&tropvert_env(&overridden, "TROPVERT_SEED", "7"));
    assert_eq!(a, b);
}

#[test]
fn scatter_by_both_methods_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&tropvert(&["commutator", "--l1", "2", "--l2", "1", "--order", "3"]));
    let mut input = v["diagram"].clone();
    input["walls"].as_array_mut().unwrap().retain(|w| w["kind"] == "line");
    let inp = dir.path().join("in.json");
    std::fs::write(&inp, input.to_string()).unwrap();
    let direct = json(&tropvert(&["scatter", "-i", path(&inp)]));
    assert_eq!(direct, v["diagram"]);
    let curves = dir.path().join("curves.json");
    let pert = json(&tropvert(&["scatter", "-i", path(&inp), "--method", "perturbation", "--curves", path(&curves)]));
    assert_eq!(pert, direct);
    let c: Value = serde_json::from_str(&std::fs::read_to_string(curves).unwrap()).unwrap();
    assert!(!c["curves"].as_array().unwrap().is_empty());
}

#[test]
fn verify_passes_on_the_quartic_commutator() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    stdout(&tropvert(&["verify", "--l1", "2", "--l2", "2", "--order", "6", "-o", path(&report)]));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for required in [
        "loop_consistency",
        "perturbation_vs_direct",
        "aggregate_equals_direct",
        "specialization",
        "two_path_gw",
        "bps_round_trip",
    ] {
        assert!(names.contains(&required), "{names:?}");
    }
}

#[test]
fn verify_cubic_seed_independence() {
    let v = json(&tropvert(&["verify", "--l1", "3", "--l2", "3", "--order", "5", "--seeds", "0,9"]));
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "seed_independence").unwrap();
    assert_eq!(check["passed"], true);
}

#[test]
fn verify_flags_a_corrupted_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&tropvert(&["commutator", "--l1", "2", "--l2", "2", "--order", "4"]));
    let mut d = v["diagram"].clone();
    let ray = d["walls"].as_array_mut().unwrap().iter_mut().find(|w| w["kind"] == "ray").unwrap();
    ray["f"][0]["coef_terms"][0]["coef"] = Value::String("5".into());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, d.to_string()).unwrap();
    let report = dir.path().join("report.json");
    let o = tropvert(&["verify", "--diagram", path(&bad), "-o", path(&report)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("failing checks: loop_consistency"));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["failing"], serde_json::json!(["loop_consistency"]));
}

#[test]
fn svg_is_written_for_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("d.svg");
    stdout(&tropvert(&["commutator", "--l1", "2", "--l2", "2", "--order", "4", "--svg", path(&svg)]));
    let s = std::fs::read_to_string(svg).unwrap();
    assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    assert!(s.contains("(1,1)"));
}
