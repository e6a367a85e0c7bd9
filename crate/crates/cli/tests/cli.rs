use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_markov-surface"))
        .args(args)
        .env_remove("MARKOV_SURFACE_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("markov-surface-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn enumerate_bound_30() {
    let o = run(&["markov", "enumerate", "--bound", "30"]);
    assert!(o.status.success());
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], serde_json::json!(["2", "5", "29"]));
}

#[test]
fn bracket_of_coordinates() {
    let o = run(&["bracket", "x", "y", "--surface", "markov"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "\"2*z^1-3*x^1*y^1\"");
}

#[test]
fn domain_error_is_structured() {
    let o = run(&["markov", "lagrange", "--z", "3"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["code"], "NotMarkovNumber");
    assert_eq!(v["error"]["input"], "3");
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["tame", "build"]).status.code(), Some(2));
}

#[test]
fn tame_build_is_deterministic_and_replays() {
    let args = ["tame", "build", "--n", "5", "--map", "1:2,2:3,3:4,4:5,5:1", "--precision", "512", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let path = scratch("solution.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let v = run(&["tame", "verify", path.to_str().unwrap()]);
    assert!(v.status.success(), "{}", stdout(&v));
    let r: Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(r["verified"], true);
}

#[test]
fn config_file_and_classify() {
    let path = scratch("a3.toml");
    std::fs::write(&path, "precision = 128\n[surface]\nA = \"4\"\nD = \"-4\"\nE = \"1\"\n").unwrap();
    let o = run(&["classify", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["adeType"], "A3");
    assert_eq!(v[0]["point"], serde_json::json!(["2", "0", "0"]));
}

#[test]
fn flow_rejects_off_surface_point() {
    let o = run(&["flow", "--point", "[\"1\",\"1\",\"2\"]", "--axis", "z", "--time", "0.5"]);
    // (1,1,2) lies on the surface; (1,2,2) does not
    assert!(o.status.success());
    let o = run(&["flow", "--point", "[\"1\",\"2\",\"2\"]", "--axis", "z"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn orbit_csv() {
    let o = run(&["flow", "--point", "[\"1\",\"1\",\"1\"]", "--axis", "y", "--time", "1", "--orbit", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.starts_with("k,x_re"));
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn env_precision_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_markov-surface")).arg("selftest").env("MARKOV_SURFACE_PRECISION", "20").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}
