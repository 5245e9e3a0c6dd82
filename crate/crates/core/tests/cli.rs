//! Exit codes and output shape of the `chainbound` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn tmp(name: &str) -> PathBuf {
    Path::new(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn star3(command: &str, extra: &[&str]) -> Output {
    let (p, h, e) = (data("star3_problem"), data("star3_hardware"), data("star3_embedding"));
    let mut args = vec![command, "--problem", &p, "--hardware", &h, "--embedding", &e];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flag_is_a_validation_failure() {
    assert_eq!(run(&["bounds", "--nope"]).status.code(), Some(1));
}

#[test]
fn exact_bounds_report_star3_values() {
    let out = star3("bounds", &["--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let centre = &v["qubits"][0];
    assert_eq!(centre["C"], "12");
    assert_eq!(centre["choi2"], "8");
    assert_eq!(centre["tight"], "6");
}

#[test]
fn failed_admissibility_exits_one() {
    assert_eq!(star3("admissible", &["--strength", "6", "--exact"]).status.code(), Some(0));
    let single = ["--strategy", "single", "--strength", "1/2", "--exact"];
    assert_eq!(star3("admissible", &single).status.code(), Some(1));
}

/// A two-node chain whose ends are pulled apart by opposite neighbours.
fn tug_of_war() -> [String; 3] {
    let files = [
        ("tug_problem.json", r#"{"num_qubits": 3, "h": [0, 10, -10], "couplers": [[0, 1, 2], [0, 2, 2]]}"#),
        ("tug_hardware.json", r#"{"num_nodes": 4, "edges": [[0, 1], [0, 2], [1, 3]]}"#),
        ("tug_embedding.json", r#"{"chains": [[0, 1], [2], [3]], "edge_map": [[0, 1, 0, 2], [0, 2, 1, 3]]}"#),
    ];
    files.map(|(name, body)| {
        let path = tmp(name);
        std::fs::write(&path, body).unwrap();
        path.display().to_string()
    })
}

#[test]
fn failed_verification_exits_one() {
    assert_eq!(star3("verify", &["--exact"]).status.code(), Some(0));
    let [p, h, e] = tug_of_war();
    let base = ["verify", "--problem", &p, "--hardware", &h, "--embedding", &e, "--exact"];
    assert_eq!(run(&base).status.code(), Some(0));
    let weak: Vec<&str> = base.iter().copied().chain(["--strength", "1/2"]).collect();
    let out = run(&weak);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
    assert_eq!(v["domain_wall"]["qubit"], 0);
}

#[test]
fn missing_file_is_an_io_error() {
    assert_eq!(run(&["solve", "--problem", "/nonexistent/problem.json"]).status.code(), Some(3));
}

#[test]
fn malformed_json_is_a_parse_error() {
    let path = tmp("malformed.json");
    std::fs::write(&path, "{\"num_qubits\": 2, \"h\": [").unwrap();
    assert_eq!(run(&["solve", "--problem", path.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn oversized_enumeration_hits_the_size_cap() {
    let n = 30;
    let couplers: Vec<_> = (0..n - 1).map(|i| serde_json::json!([i, i + 1, 1])).collect();
    let problem = serde_json::json!({ "num_qubits": n, "h": vec![0; n], "couplers": couplers });
    let path = tmp("chain30.json");
    std::fs::write(&path, problem.to_string()).unwrap();
    let out = run(&["solve", "--problem", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tts_rejects_probability_outside_unit_interval() {
    assert_eq!(run(&["tts", "--s", "1.5"]).status.code(), Some(1));
    let out = run(&["tts", "--s", "0.5", "--anneal-time", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn sweep_writes_csv_header() {
    let (p, h, e) = (data("sweep_problem"), data("sweep_hardware"), data("sweep_embedding"));
    let out = run(&[
        "sweep", "--problem", &p, "--hardware", &h, "--embedding", &e, "--grid", "1,2", "--restarts", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("F,success_prob,broken_rate,tts,samples,seed"));
    assert_eq!(text.lines().count(), 3);
}
