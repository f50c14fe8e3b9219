//! End-to-end tests of the `fairvote` binary: exit codes, determinism, and
//! the JSON contracts of each subcommand.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairvote"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> TempDir {
        let dir = std::env::temp_dir().join(format!("fairvote-test-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        TempDir(dir)
    }

    fn file(&self, name: &str, contents: &str) -> String {
        let path = self.0.join(name);
        std::fs::write(&path, contents).unwrap();
        path.to_string_lossy().into_owned()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

const E0: &str = r#"{
    "candidates": ["c1", "c2", "d1", "d2"],
    "k": 2,
    "voters": [
        {"id": "v1", "approvals": ["c1"]},
        {"id": "v2", "approvals": ["c1"]},
        {"id": "v3", "approvals": ["c2"]},
        {"id": "v4", "approvals": ["c2"]}
    ]
}"#;

const E0_PRIME: &str = r#"{
    "candidates": ["c1", "c2", "d1", "d2"],
    "k": 2,
    "voters": [
        {"id": "v1", "approvals": []},
        {"id": "v2", "approvals": ["c1"]},
        {"id": "v3", "approvals": ["c2"]},
        {"id": "v4", "approvals": ["c2"]}
    ]
}"#;

#[test]
fn run_gjcr_reports_committee_and_axiom() {
    let dir = TempDir::new("run");
    let input = dir.file("e0.json", E0);
    let out = run(&["run", "--rule", "gjcr", "--input", &input, "--seed", "1"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["committee"], serde_json::json!(["c1", "c2"]));
    assert_eq!(v["axiom"]["satisfied"], true);
    assert!(out.stderr.is_empty());
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new("determinism");
    let input = dir.file("e0p.json", E0_PRIME);
    let args = [
        "dist",
        "--rule",
        "softmax-pav",
        "--input",
        &input,
        "--mc",
        "200",
        "--seed",
        "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exact_distribution_of_uniform_rule() {
    let dir = TempDir::new("dist");
    let input = dir.file("e0p.json", E0_PRIME);
    let out = run(&[
        "dist",
        "--rule",
        "uniform-ejr",
        "--input",
        &input,
        "--exact",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["mode"], "exact");
    assert_eq!(v["support"].as_array().unwrap().len(), 4);
    assert_eq!(v["pi"]["c1"], 0.25);
    assert_eq!(v["pi"]["c2"], 1.0);
}

#[test]
fn compare_reports_candidate_delta() {
    let dir = TempDir::new("compare");
    let a = dir.file("a.json", E0);
    let b = dir.file("b.json", E0_PRIME);
    let out = run(&[
        "compare",
        "--rule",
        "uniform-ejr",
        "--input-a",
        &a,
        "--input-b",
        &b,
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["per_candidate_delta"]["c1"], 0.75);
    let deltas = v["delta_hat"].as_array().unwrap();
    assert_eq!(deltas.len(), 6);
    assert_eq!(deltas[0]["eps"], 0.0);
}

#[test]
fn gen_output_round_trips_through_run() {
    let dir = TempDir::new("gen");
    let out = run(&["gen", "--family", "blocks", "--n", "4", "--k", "2", "--m", "4"]);
    let v = stdout_json(&out);
    let election = v["election"].to_string();
    let input = dir.file("gen.json", &election);
    let out2 = run(&["run", "--rule", "gjcr", "--input", &input, "--seed", "0"]);
    let v2 = stdout_json(&out2);
    assert_eq!(v2["committee"], serde_json::json!(["c1", "c2"]));
    assert_eq!(v["perturbations"].as_array().unwrap().len(), 1);
}

#[test]
fn dynamic_subcommand_runs_both_engines() {
    let dir = TempDir::new("dynamic");
    let base = dir.file("base.json", E0);
    let steps = dir.file(
        "steps.json",
        r#"{"steps": [{"voter": "v1", "approvals": []}]}"#,
    );
    for rule in ["softmax-gjcr", "reduce:uniform-ejr"] {
        let out = run(&[
            "dynamic", "--rule", rule, "--base", &base, "--steps-file", &steps, "--seed", "4",
        ]);
        let v = stdout_json(&out);
        assert_eq!(v["committees"].as_array().unwrap().len(), 2);
        assert_eq!(v["committees"][0], serde_json::json!(["c1", "c2"]));
        assert_eq!(
            v["per_step_recourse"].as_array().unwrap().len(),
            1
        );
    }
}

#[test]
fn check_subcommand_reports_witness() {
    let dir = TempDir::new("check");
    let input = dir.file("e0.json", E0);
    let out = run(&["check", "--input", &input, "--committee", "c1,d1"]);
    let v = stdout_json(&out);
    assert_eq!(v["satisfied"], false);
    assert_eq!(v["witness"]["candidate"], "c2");
    assert_eq!(v["witness"]["voters"], serde_json::json!(["v3", "v4"]));

    let out2 = run(&["check", "--input", &input, "--committee", "c1,c2"]);
    assert_eq!(stdout_json(&out2)["satisfied"], true);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new("exit");

    // Usage error: unknown subcommand.
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    // Input error: malformed document.
    let bad = dir.file("bad.json", "{ not json");
    let out = run(&["run", "--rule", "gjcr", "--input", &bad, "--seed", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    // Input error: k exceeds candidate count.
    let bad_k = dir.file(
        "badk.json",
        r#"{"candidates": ["a"], "k": 2, "voters": [{"id": "v", "approvals": []}]}"#,
    );
    let out = run(&["run", "--rule", "gjcr", "--input", &bad_k, "--seed", "0"]);
    assert_eq!(out.status.code(), Some(3));

    // Resource-cap error: enumeration space too large for the uniform rule.
    let mut candidates = Vec::new();
    for i in 0..64 {
        candidates.push(format!("\"c{i}\""));
    }
    let huge = format!(
        r#"{{"candidates": [{}], "k": 6, "voters": [{{"id": "v", "approvals": ["c0"]}}]}}"#,
        candidates.join(",")
    );
    let huge = dir.file("huge.json", &huge);
    let out = run(&[
        "dist",
        "--rule",
        "uniform-ejr",
        "--input",
        &huge,
        "--exact",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
