//! End-to-end runs of the `spherecap` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value, path: &[&str]) -> f64 {
    let mut cur = v;
    for k in path {
        cur = &cur[*k];
    }
    cur.as_f64().unwrap_or_else(|| panic!("{path:?} missing in {v}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const ANTIPODAL: &str = r#"{"d":2,"n":2,"points":[[0,0,1],[0,0,-1]]}"#;

#[test]
fn constants_record() {
    let v = json(&run(&["constants", "--dim", "2"]));
    assert_eq!(v["command"], "constants");
    assert_eq!(v["schema_version"], "1");
    assert!((num(&v, &["results", "c_d"]) - 0.25).abs() < 1e-15);
    assert!((num(&v, &["results", "i_d"]) - 4.0 / 3.0).abs() < 1e-15);
}

#[test]
fn discrepancy_of_antipodal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pair.json", ANTIPODAL);
    let v = json(&run(&["discrepancy", "--points", &f, "--alpha", "1"]));
    assert!((num(&v, &["results", "value_squared"]) - 1.0 / 12.0).abs() < 1e-12, "{v}");
    let h = json(&run(&["discrepancy", "--points", &f, "--hemisphere"]));
    assert!(num(&h, &["results", "value_squared"]).abs() < 1e-15, "{h}");
}

#[test]
fn csv_points_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pair.csv", "# headerless, one point per row\n0,0,1\n0,0,-1\n");
    let v = json(&run(&["discrepancy", "--points", &f, "--alpha", "1"]));
    assert!((num(&v, &["results", "value_squared"]) - 1.0 / 12.0).abs() < 1e-12, "{v}");
}

#[test]
fn bounds_record() {
    let v = json(&run(&["bounds", "--dim", "4", "--epsilon", "0.5", "--alpha", "1"]));
    assert_eq!(v["results"]["upper"], 2);
    let m = json(&run(&["bounds", "--dim", "4", "--epsilon", "0.5", "--alpha-mode", "sqrt2cd"]));
    assert!(m["results"]["upper"].as_u64().unwrap() >= 2);
}

#[test]
fn generate_then_measure_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.json");
    let pts = pts.to_str().unwrap();
    let gen = run(&["generate", "--dim", "3", "--n", "20", "--seed", "5", "--out", pts]);
    assert!(gen.status.success());
    assert!(gen.stdout.is_empty());
    let text = std::fs::read_to_string(pts).unwrap();
    let file: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(file["n"], 20);
    let v = json(&run(&["discrepancy", "--points", pts, "--alpha", "1"]));
    assert!(num(&v, &["results", "value_squared"]) > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.json");
    let pts = pts.to_str().unwrap();
    assert!(run(&["generate", "--dim", "2", "--n", "12", "--seed", "9", "--out", pts]).status.success());
    for args in [
        vec!["verify-stolarsky", "--points", pts, "--alpha", "1", "--samples", "2000", "--t-nodes", "16"],
        vec!["optimize", "--points", pts, "--max-iters", "50"],
        vec!["sweep", "--family", "sqrt2cd", "--dims", "1..40", "--epsilon", "0.3"],
    ] {
        let a = run(&args);
        let mut threaded = vec!["--threads", "3"];
        threaded.extend(&args);
        let b = run(&threaded);
        assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_table() {
    let out = run(&["--format", "csv", "sweep", "--family", "classical", "--dims", "1,2,3", "--epsilon", "0.5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "d,epsilon,alpha,g,lower,upper,flag");
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("1,"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["constants"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let missing = run(&["discrepancy", "--points", "/definitely/not/here.json", "--alpha", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
    assert!(missing.stdout.is_empty());

    let domain = run(&["bounds", "--dim", "4", "--epsilon", "2", "--alpha", "1"]);
    assert_eq!(domain.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&domain.stderr).unwrap();
    assert_eq!(err["command"], "bounds");
    assert_eq!(err["error"]["kind"], "domain");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"d":2,"n":1,"points":[[1,0]]}"#);
    assert_eq!(run(&["discrepancy", "--points", &bad, "--alpha", "1"]).status.code(), Some(3));
}

#[test]
fn optimize_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "pair.json", r#"{"d":2,"n":2,"points":[[1,0,0],[0,1,0]]}"#);
    let out = dir.path().join("opt.json");
    let o = out.to_str().unwrap();
    let v = json(&run(&["optimize", "--points", &f, "--points-out", o, "--max-iters", "2000"]));
    assert!((num(&v, &["results", "final_objective"]) - 4.0).abs() < 1e-6, "{v}");
    let d = json(&run(&["discrepancy", "--points", o, "--alpha", "1"]));
    assert!((num(&d, &["results", "value_squared"]) - 1.0 / 12.0).abs() < 1e-6);
}

#[test]
fn floats_use_seventeen_digits() {
    let out = run(&["cap-measure", "--dim", "2", "--t", "-0.3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    // (1 + 0.3)/2 in binary, printed with 17 significant digits
    assert!(text.contains("\"measure\":6.4999999999999991e-1"), "{text}");
}
