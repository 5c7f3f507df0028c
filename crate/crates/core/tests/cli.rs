use std::path::PathBuf;
use std::process::{Command, Output};

use davis_kit::cli::Report;
use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_davis-kit"));
    c.env_remove("DAVIS_KIT_ELEMENT_CAP");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = run(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)));
    (o.status.code().unwrap(), v)
}

#[test]
fn spherical_a2() {
    let o = run(&["spherical", "--cartan", &data("a2.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("f = 2") && text.contains("4 spherical subsets"), "{text}");
    let (code, v) = json(&["spherical", "--cartan", &data("a2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["facts"]["f_value"], 2);
    assert_eq!(v["facts"]["count"], 4);
}

#[test]
fn inline_cartan() {
    let (code, v) = json(&["spherical", "--cartan", "[[2,-2],[-2,2]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["facts"]["f_value"], 1);
}

#[test]
fn hecke_quadratic_relation() {
    let o = run(&["hecke", "mul", "--cartan", &data("a2.json"), "--a", "0", "--b", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("(q−1)·T_[0] + q·T_[]"), "{}", stdout(&o));
}

#[test]
fn involutions() {
    for kind in ["im", "antipode", "sigma-im"] {
        let o = run(&["hecke", "involution", "--cartan", &data("a2.json"), "--kind", kind, "--word", "0,1"]);
        assert_eq!(o.status.code(), Some(0), "{kind}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn davis_and_resolution() {
    let o = run(&["davis", "--cartan", &data("a2.json"), "--homology"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("H_0 = 1"), "{text}");
    let (code, v) = json(&["resolution-check", "--cartan", &data("a2.json"), "--char", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    let (code, _) = json(&["davis", "--group", "gl:2,3"]);
    assert_eq!(code, 0);
}

#[test]
fn infinite_group_needs_a_radius() {
    let o = run(&["davis", "--cartan", &data("affine_a1.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["davis", "--cartan", &data("affine_a1.json"), "--radius", "3", "--homology"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn weyl_ball_and_caps() {
    let (code, _) = json(&["weyl-ball", "--cartan", &data("affine_a1.json"), "--radius", "4"]);
    assert_eq!(code, 0);
    let o = run(&["--element-cap", "3", "weyl-ball", "--cartan", &data("a2.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin()
        .env("DAVIS_KIT_ELEMENT_CAP", "3")
        .args(["weyl-ball", "--cartan", &data("a2.json")])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let o = run(&["--element-cap", "0", "spherical", "--cartan", &data("a2.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn spherical_hecke() {
    let (code, v) = json(&["spherical-hecke", "--group", "gl:2,2", "--char", "0", "--verify-iso"]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    let (code, _) = json(&["spherical-hecke", "--group", "gl:2,3", "--char", "5", "--verify-iso"]);
    assert_eq!(code, 0);
}

#[test]
fn non_ordinary_characteristic_is_rejected() {
    let o = run(&["spherical-hecke", "--group", "gl:2,2", "--char", "2"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn tree_resolution_file_and_builtin() {
    for input in [data("s3star.json"), "builtin:s3-star".to_string()] {
        let o = run(&["tree-resolution", "--input", &input]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert!(text.contains("ranks = (6, 2)"), "{text}");
        assert!(text.contains("0 → 6 → 8 → 2 → 0"), "{text}");
    }
}

#[test]
fn idempotents_and_homology() {
    for file in ["s3star.json", "s3star_leaf_stabilizers.json"] {
        let (code, v) = json(&["verify-idempotents", "--input", &data(file)]);
        assert_eq!(code, 0, "{file}: {v}");
        let (code, v) = json(&["cosheaf-homology", "--input", &data(file)]);
        assert_eq!(code, 0, "{file}: {v}");
    }
}

#[test]
fn inconsistent_system_is_an_input_error() {
    let o = run(&["tree-resolution", "--input", &data("path_not_equivariant.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_inputs_exit_2() {
    assert_eq!(run(&["spherical", "--cartan", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(run(&["spherical", "--cartan", "[[2,1],[-1,2]]"]).status.code(), Some(2));
    assert_eq!(run(&["spherical-hecke", "--group", "sl:2,2"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["hecke", "mul", "--cartan", "[[2,-1],[-1,2]]", "--a", "0,x", "--b", "1"]).status.code(), Some(2));
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, r#"{"kind": "hecke-mul", "cartan": [[2, -2], [-1, 2]], "a": [0, 1], "b": [1, 0]}"#).unwrap();
    let (code, v) = json(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], "hecke-mul");
}

#[test]
fn json_is_deterministic_and_round_trips() {
    let args = ["--json", "tree-resolution", "--input", "builtin:s3-star"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let report: Report = serde_json::from_slice(&a).unwrap();
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", String::from_utf8(a).unwrap());
    assert!(report.timing_ms.is_none());

    let timed = run(&["--json", "--timing", "spherical", "--cartan", &data("a2.json")]).stdout;
    let report: Report = serde_json::from_slice(&timed).unwrap();
    assert!(report.timing_ms.is_some());
}

#[test]
fn digest_tracks_input() {
    let (_, a) = json(&["spherical", "--cartan", &data("a2.json")]);
    let (_, b) = json(&["spherical", "--cartan", "[[2,-1],[-1,2]]"]);
    let (_, c) = json(&["spherical", "--cartan", "[[2,-2],[-1,2]]"]);
    assert_eq!(a["input_digest"], b["input_digest"]);
    assert_ne!(a["input_digest"], c["input_digest"]);
}

#[test]
fn help_exits_0() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tree-resolution"));
}
