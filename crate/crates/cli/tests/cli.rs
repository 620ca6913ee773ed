use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_boxswitch"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn diagnostic(out: &Output) -> Value {
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    let v: Value =
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {text}"));
    v["diagnostic"].clone()
}

const MALFORMED_SCENARIOS: [&str; 16] = [
    "{",
    "[]",
    "{}",
    r#"{"scenario": "frobnicate"}"#,
    r#"{"scenario": "teleport", "qubits": 0}"#,
    r#"{"scenario": "teleport", "qubits": 9}"#,
    r#"{"scenario": "teleport", "bogus": 1}"#,
    r#"{"format_version": 2, "scenario": "teleport"}"#,
    r#"{"scenario": "switch", "f": "X", "g": "Z"}"#,
    r#"{"scenario": "switch", "f": "FROB", "g": "Z", "x": 0}"#,
    r#"{"scenario": "switch", "f": {"matrix": [[1, 1], [0, 1]]}, "g": "X", "x": 1}"#,
    r#"{"scenario": "switch", "f": "X", "g": "CNOT", "x": 1}"#,
    r#"{"scenario": "teleport", "control": [1, 1]}"#,
    r#"{"scenario": "noswitch_witness", "box": "triple"}"#,
    r#"{"scenario": "admissibility", "construction": "switched_channel", "trials": 0}"#,
    r#"{"scenario": "teleport", "tolerance": "small"}"#,
];

const MALFORMED_CIRCUITS: [&str; 4] = [
    "wires 0\n\ngate FROB 0\n",
    "wires a b\ngate CNOT a\n",
    "gate H a\n",
    "wires a\nprep NOPE a\n",
];

#[test]
fn malformed_inputs_give_structured_diagnostics() {
    let dir = TempDir::new().unwrap();
    let mut seen = 0;
    let inputs = MALFORMED_SCENARIOS
        .iter()
        .map(|t| ("--scenario", *t))
        .chain(MALFORMED_CIRCUITS.iter().map(|t| ("--circuit", *t)));
    for (i, (flag, text)) in inputs.enumerate() {
        let path = write(&dir, &format!("bad{i}"), text);
        let out = run(&[flag, &path]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(out.stdout.is_empty(), "{text}");
        let d = diagnostic(&out);
        for key in ["kind", "location", "message"] {
            assert!(d[key].is_string(), "{text}: {d}");
        }
        assert!(!d["kind"].as_str().unwrap().is_empty());
        assert!(!d["message"].as_str().unwrap().is_empty());
        seen += 1;
    }
    assert_eq!(seen, 20);
}

#[test]
fn diagnostics_point_at_the_problem() {
    let dir = TempDir::new().unwrap();
    let d = diagnostic(&run(&[
        "--circuit",
        &write(&dir, "c", "wires 1\n\ngate FROB 0\n"),
    ]));
    assert_eq!(d["kind"], "circuit_unknown_gate");
    assert_eq!(d["location"], "line 3, column 6");
    let d = diagnostic(&run(&[
        "--scenario",
        &write(&dir, "s", "{\n  \"scenario\": }"),
    ]));
    assert_eq!(d["kind"], "syntax");
    assert!(d["location"].as_str().unwrap().starts_with("line 2"));
    let d = diagnostic(&run(&["--scenario", "/nonexistent/file.json"]));
    assert_eq!(d["kind"], "io");
    let d = diagnostic(&run(&[]));
    assert_eq!(d["kind"], "usage");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "t.json",
        r#"{"scenario": "teleport", "qubits": 2, "shots": 5000, "seed": 17}"#,
    );
    let a = run(&["--scenario", &spec]);
    let b = run(&["--scenario", &spec]);
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let out = dir.path().join("report.json");
    let c = run(&["--scenario", &spec, "--out", out.to_str().unwrap()]);
    assert_eq!(c.status.code(), Some(0));
    assert!(c.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), a.stdout);
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn flags_override_file_values() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "t.json",
        r#"{"scenario": "teleport", "shots": 100, "seed": 1, "tolerance": 1e-8}"#,
    );
    let r = report(&[
        "--scenario",
        &spec,
        "--seed",
        "42",
        "--shots",
        "3000",
        "--tol",
        "1e-9",
    ]);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["parameters"]["seed"], 42);
    assert_eq!(r["parameters"]["shots"], 3000);
    assert_eq!(r["parameters"]["tolerance"].as_f64(), Some(1e-9));
    assert_eq!(r["results"]["sampled"]["shots"], 3000);
    let plain = report(&["--scenario", &spec]);
    assert_eq!(plain["seed"], 1);
    assert_ne!(plain["results"]["sampled"], r["results"]["sampled"]);
}

#[test]
fn failing_verdicts_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let spec = write(
        &dir,
        "n.json",
        r#"{"scenario": "nonsignaling", "box": "CNOT"}"#,
    );
    let out = run(&["--scenario", &spec]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["verdict"], "fail");
    assert!(r["results"]["a_to_b_deviation"].as_f64().unwrap() > 0.1);
}

#[test]
fn circuit_reports_rule_violations() {
    let dir = TempDir::new().unwrap();
    let ok = write(&dir, "ok", "wires 2\ngate H 0\ngate CNOT 0 1\n");
    let r = report(&["--circuit", &ok]);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["canonical"], "wires 2\ngate H 0\ngate CNOT 0 1\n");

    let over = write(
        &dir,
        "over",
        "wires a\nbudget f 1\noracle f a\noracle f a\n",
    );
    let out = run(&["--circuit", &over]);
    assert_eq!(out.status.code(), Some(1));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["violations"][0].as_str().unwrap().starts_with("rule 4"));

    let cyclic = write(
        &dir,
        "cyclic",
        "wires a b\ngate H a\ngate H b\nlink 1 0\nlink 0 1\n",
    );
    let r = report(&["--circuit", &cyclic]);
    assert!(r["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v.as_str().unwrap().starts_with("rule 3")));
}

#[test]
fn help_exits_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--scenario"));
}
