//! End-to-end tests of the binary: exit codes, determinism, and the
//! documented invocation patterns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn kontact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kontact"))
        .args(args)
        .env_remove("KONTACT_SEED")
        .output()
        .expect("binary runs")
}

fn example(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.pop();
    p.pop();
    p.push("docs/examples");
    p.push(name);
    p.to_string_lossy().into_owned()
}

#[test]
fn corpus_run_control_json_passes() {
    let out = kontact(&["corpus", "run", "control", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(v["kind"], "corpus-run");
    // The closure table check is part of the report.
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["name"] == "control.closure.table" && c["pass"] == true));
}

#[test]
fn bad_kform_exits_one_with_corank_mismatch() {
    let out = kontact(&["check-kcontact", &example("bad.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("CorankMismatch"), "{text}");
}

#[test]
fn good_kform_exits_zero() {
    let out = kontact(&["check-kcontact", &example("contact.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn integrate_with_conservation_check() {
    let out = kontact(&[
        "integrate",
        &example("frontwheel.json"),
        "--b1",
        "1",
        "--b2",
        "0.5",
        "--t",
        "1",
        "--step",
        "1e-3",
        "--check-constant",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pass constant"), "{text}");
}

#[test]
fn integrate_polynomial_profile() {
    let out = kontact(&[
        "integrate",
        &example("frontwheel.json"),
        "--b1",
        "1",
        "--b2",
        "poly:0,0,1",
        "--t",
        "1",
        "--step",
        "1e-3",
        "--check-constant",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let out = kontact(&["closure", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);

    let out = kontact(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_output_for_fixed_seed() {
    let run = || kontact(&["corpus", "run", "jet", "--json", "--seed", "0xC0FFEE"]);
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "byte-identical output for identical inputs and seed");
    // The seed can also come from the environment.
    let c = Command::new(env!("CARGO_BIN_EXE_kontact"))
        .args(["corpus", "run", "jet", "--json"])
        .env("KONTACT_SEED", "0xC0FFEE")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn closure_and_bracket_table_commands() {
    let out = kontact(&["closure", &example("frontwheel.json"), "--generators", "X1,X2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("dim: 4"), "{text}");

    let out = kontact(&["bracket-table", &example("frontwheel.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "bracket-table");
}

#[test]
fn build_eta_and_prolong_and_companion() {
    let file = example("frontwheel.json");
    let out = kontact(&["build-eta", &file, "--distribution", "Y1,Y2", "--symmetries", "X3,X4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let out = kontact(&["prolong", &file, "--copies", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let doc = v["facts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f[0] == "document")
        .map(|f| f[1].clone())
        .unwrap();
    assert_eq!(doc["chart"].as_array().unwrap().len(), 8);

    let out = kontact(&["companion", &file, "--theta", "1,0", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let order = v["facts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f[0] == "nilpotency_order")
        .map(|f| f[1].clone())
        .unwrap();
    assert_eq!(order, serde_json::json!(3));
}

#[test]
fn fd_check_command() {
    let out = kontact(&["fd-check", &example("frontwheel.json"), "--field", "X1", "--vars", "x2,x3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn hamiltonians_command() {
    let out = kontact(&["hamiltonians", &example("contact.json"), "--fields", "R,Xp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("pass hamiltonian.R"));
    assert!(text.contains("pass hamiltonian.Xp"));
}

#[test]
fn corpus_run_all_is_stable() {
    let out = kontact(&["corpus", "run", "--all", "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let facts = v["facts"].as_array().unwrap();
    let passes: Vec<&str> = facts
        .iter()
        .filter(|f| f[0].as_str().unwrap().ends_with(".pass"))
        .map(|f| f[0].as_str().unwrap().strip_suffix(".pass").unwrap())
        .collect();
    assert_eq!(passes.len(), 10);
    // Order-stable by example name.
    let mut sorted = passes.clone();
    sorted.sort();
    assert_eq!(passes, sorted);
}

#[test]
fn corpus_list_contains_all_examples() {
    let out = kontact(&["corpus", "list", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let names = v["facts"][0][1].as_array().unwrap();
    assert_eq!(names.len(), 10);
}
