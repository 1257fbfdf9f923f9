use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../families")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn posmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posmon")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect()
}

#[test]
fn atoms_examples() {
    let out = posmon(&["atoms", &fixture("numerical_2_3_5.spec")]);
    assert!(out.status.success());
    assert_eq!(strings(&json(&out)["atoms"]), ["2", "3"]);

    let out = json(&posmon(&["atoms", &fixture("geometric_2_3.spec"), "--depth", "3"]));
    assert_eq!(strings(&out["atoms"]), ["8/27", "4/9", "2/3", "1"]);
    assert_eq!(out["depth"], 3);

    let out = json(&posmon(&["atoms", &fixture("prime_family.spec"), "--depth", "2"]));
    assert_eq!(out["atoms"].as_array().unwrap().len(), 4);
}

#[test]
fn factor_examples() {
    let out = json(&posmon(&["factor", &fixture("numerical_2_3.spec"), "6"]));
    assert_eq!(out["factorizations"].as_array().unwrap().len(), 2);
    assert_eq!(out["lengths"], serde_json::json!([2, 3]));
    assert_eq!(strings(&out["divisors"]), ["2", "3", "4", "6"]);

    let out = json(&posmon(&["factor", &fixture("halves_thirds.spec"), "1"]));
    assert_eq!(out["lengths"], serde_json::json!([2, 3]));

    let out = json(&posmon(&["factor", &fixture("geometric_3_2.spec"), "0"]));
    assert_eq!(out["lengths"], serde_json::json!([0]));
    assert_eq!(out["factorizations"], serde_json::json!([{ "atoms": [], "length": 0 }]));
}

#[test]
fn non_members_are_not_errors() {
    let out = posmon(&["factor", &fixture("numerical_2_3.spec"), "1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["member"], false);
    let out = posmon(&["divisors", &fixture("numerical_2_3.spec"), "1"]);
    assert_eq!(json(&out)["member"], false);
}

#[test]
fn classify_examples() {
    let out = json(&posmon(&["classify", &fixture("geometric_3_2.spec")]));
    let ffm = out["verdicts"].as_array().unwrap().iter().find(|v| v["property"] == "FFM").unwrap();
    assert_eq!(ffm["status"], "Proved");

    let out = json(&posmon(&["classify", &fixture("geometric_2_3.spec")]));
    let ffm = out["verdicts"].as_array().unwrap().iter().find(|v| v["property"] == "FFM").unwrap();
    assert_eq!(ffm["status"], "EvidenceAtDepth");
    assert_eq!(ffm["direction"], "contradicts");
    let xs: Vec<_> = out["witness_search"]["witnesses"].as_array().unwrap().iter().map(|w| w["x"].clone()).collect();
    assert!(xs.contains(&Value::from("2")));

    let out = json(&posmon(&["classify", &fixture("multicyclic_mixed.spec")]));
    let text = out.to_string();
    assert!(text.contains("equivalent to MultiCyclic({2/3})"));
}

#[test]
fn witness_csv_rows() {
    let out = posmon(&["witness", &fixture("geometric_2_3.spec"), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("depth,x,delta"));
    assert!(text.lines().any(|l| l == "4,2,16/81"));
    assert!(lines.all(|l| l.split(',').count() == 3));
}

#[test]
fn semiring_examples() {
    let out = json(&posmon(&["semiring", "3/2"]));
    assert_eq!(out["suite"]["outcome"], "all-hold");
    assert_eq!(strings(&out["suite"]["bi_atoms"]["bi_atoms"]), ["3/2"]);

    let out = json(&posmon(&["semiring", "r = 2/3"]));
    assert_eq!(out["suite"]["outcome"], "all-fail");

    let out = posmon(&["semiring", "1/2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["suite"]["outcome"], "not-applicable");
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("posmon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.spec");
    std::fs::write(&bad, "kind = finite\n\ngenerators = 1, 0\n").unwrap();
    let out = posmon(&["atoms", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    assert_eq!(err["line"], 3);

    assert_eq!(posmon(&["atoms"]).status.code(), Some(1));
    assert_eq!(posmon(&["classify", &fixture("numerical_2_3.spec"), "--depths", "4,2"]).status.code(), Some(1));

    let out = posmon(&["witness", &fixture("geometric_2_3.spec"), "--cap", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["report"]["coverage"].as_array().unwrap().iter().any(|c| !c["guard_trip"].is_null()));

    let out = posmon(&["factor", &fixture("geometric_2_3.spec"), "4", "--depth", "6", "--factorization-cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "guard_trip");
    std::fs::remove_dir_all(dir).unwrap();
}
