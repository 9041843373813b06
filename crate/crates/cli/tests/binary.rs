use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pfqn(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pfqn"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let r = pfqn(&all);
    assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
    serde_json::from_str(&r.stdout).unwrap()
}

fn export(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    let r = pfqn(&["catalog", "show", name, "--export", dir.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    (dir.join(format!("{name}.pf.json")), dir.join(format!("{name}.basis.json")))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn lugano_verdict_and_game() {
    let dir = tempfile::tempdir().unwrap();
    let (pf, _) = export(dir.path(), "lugano");
    let v = json(&["pf", "classify", s(&pf)]);
    assert_eq!(v["validity"], "valid");
    assert_eq!(v["causality"], "non_causal");
    assert_eq!(v["has_global_past"], false);
    let g = json(&["pf", "game", s(&pf)]);
    assert_eq!(g["causal_bound"], "7/8");
    assert_eq!(g["best_causal_value"], "3/4");
    assert_eq!(g["swap_value"], "1/1");
    let v = json(&["pf", "validate", s(&pf), "--method", "both"]);
    assert_eq!(v["valid"], true);
    assert_eq!(v["agree"], true);
}

#[test]
fn domino_is_ambiguous_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (pf, basis) = export(dir.path(), "domino");
    let v = json(&["basis", "classify", s(&basis)]);
    assert_eq!(v["kind"], "ambiguous");
    assert!(!v["witnesses"].as_array().unwrap().is_empty());
    let v = json(&["pf", "validate", s(&pf)]);
    assert_eq!(v["valid"], false);
    let c = json(&["basis", "check", s(&basis)]);
    assert_eq!(c["complete"], true);
    assert_eq!(c["unambiguous"], false);
    assert_eq!(c["weakly_unambiguous"], false);
}

#[test]
fn errors_exit_two_with_json_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let (_, basis) = export(dir.path(), "domino");
    let r = pfqn(&["basis", "to-pf", s(&basis)]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
    let e: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(e["error"], "ambiguous");

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"parties":[],"table":[],"extra":1}"#).unwrap();
    let r = pfqn(&["pf", "classify", s(&bad)]);
    assert_eq!(r.code, 2);
    let e: Value = serde_json::from_str(r.stderr.trim()).unwrap();
    assert_eq!(e["error"], "json");

    let r = pfqn(&["pf", "classify", "/nonexistent/file.json"]);
    assert_eq!(r.code, 2);
    let r = pfqn(&["frobnicate"]);
    assert_eq!(r.code, 2);
    assert_eq!(serde_json::from_str::<Value>(r.stderr.trim()).unwrap()["error"], "usage");
}

#[test]
fn table_to_basis_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let (pf, _) = export(dir.path(), "qutrit-lugano");
    let basis = dir.path().join("generated.json");
    let r = pfqn(&["pf", "to-basis", s(&pf), "--seed", "4"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    std::fs::write(&basis, &r.stdout).unwrap();
    let back = json(&["basis", "to-pf", s(&basis)]);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&pf).unwrap()).unwrap();
    assert_eq!(back["pf"], original);
    assert_eq!(json(&["basis", "classify", s(&basis)])["kind"], "unambiguous_qnlwe");
}

#[test]
fn explicit_unitaries_reproduce_the_catalog_basis() {
    let dir = tempfile::tempdir().unwrap();
    let (pf, listed) = export(dir.path(), "shift");
    let u = dir.path().join("shift.unitaries.json");
    let generated = json(&["pf", "to-basis", s(&pf), "--unitaries", s(&u)]);
    let load = |v: Value| {
        serde_json::from_value::<pfqn_cli::docs::BasisDocument>(v)
            .unwrap()
            .to_basis()
            .unwrap()
    };
    let listed = load(serde_json::from_str(&std::fs::read_to_string(listed).unwrap()).unwrap());
    let tol = pfqn::linalg::DEFAULT_TOL;
    assert!(pfqn::correspondence::same_state_set(&load(generated), &listed, tol).is_some());
}

#[test]
fn repair_is_deterministic_and_unambiguous() {
    let dir = tempfile::tempdir().unwrap();
    let (_, basis) = export(dir.path(), "accidental-basis");
    let first = pfqn(&["basis", "repair", s(&basis), "--seed", "7"]);
    let second = pfqn(&["basis", "repair", s(&basis), "--seed", "7"]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert_eq!(first.stdout, second.stdout);
    let repaired = dir.path().join("repaired.json");
    std::fs::write(&repaired, &first.stdout).unwrap();
    assert_eq!(json(&["basis", "check", s(&repaired)])["unambiguous"], true);
    let before = json(&["basis", "to-pf", s(&basis)]);
    let after = json(&["basis", "to-pf", s(&repaired)]);
    assert_eq!(before["pf"], after["pf"]);
}

#[test]
fn cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let (pf, _) = export(dir.path(), "lugano");
    let r = pfqn(&["pf", "validate", s(&pf), "--method", "brute", "--cap", "10"]);
    assert_eq!(r.code, 2);
    assert_eq!(serde_json::from_str::<Value>(r.stderr.trim()).unwrap()["error"], "too_large");
    let v = json(&["pf", "classify", s(&pf), "--cap", "10"]);
    assert_eq!(v["cross_check"]["status"], "skipped");
    assert_eq!(v["causality"], "non_causal");
}

#[test]
fn catalog_listing_is_complete() {
    let list = json(&["catalog", "list"]);
    let names: Vec<&str> = list
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, pfqn::catalog::list());
    let r = pfqn(&["catalog", "show", "nope"]);
    assert_eq!(r.code, 2);
    let text = pfqn(&["catalog", "show", "gyni3"]);
    assert!(text.stdout.contains("gyni3"));
}
