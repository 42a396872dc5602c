use std::process::{Command, Output};

use serde_json::Value;

fn qgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgw")).args(args).output().unwrap()
}

#[test]
fn help_exits_zero() {
    assert_eq!(qgw(&["--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qgw(&["check", "qybe", "--series", "E", "--rank", "1"]).status.code(), Some(2));
    assert_eq!(qgw(&["check", "nothing", "--series", "A", "--rank", "1"]).status.code(), Some(2));
    assert_eq!(qgw(&["check", "flatness", "--series", "A", "--rank", "1", "--max-degree", "40"]).status.code(), Some(2));
}

#[test]
fn check_emits_json_envelope() {
    let out = qgw(&["check", "qybe", "--series", "A", "--rank", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tool"], "qgw");
    assert_eq!(v["detail"]["qybe"], "pass");
    assert!(v["timing_ms"].is_u64());
    assert_eq!(v["conventions_sha256"].as_str().map(str::len), Some(64));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("qgw-cli-test-{}.json", std::process::id()));
    let out = qgw(&["check", "cybe", "--series", "C", "--rank", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("cybe: pass"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["detail"]["cybe"], "pass");
    let _ = std::fs::remove_file(path);
}
