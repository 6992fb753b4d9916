mod common;

use std::process::{Command, Output};

use serde_json::Value;

use basis_paths::hbps::SHARED_EDGES_MESSAGE;
use common::fixture_path;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_basis-paths"))
        .args(args)
        .output()
        .expect("run cli")
}

fn spec(name: &str) -> String {
    fixture_path(name).to_str().unwrap().to_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("structured output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_single_line_error(out: &Output) {
    let err = stderr(out);
    assert_eq!(err.lines().count(), 1, "{err:?}");
    assert!(out.stdout.is_empty());
}

#[test]
fn build_reports_graph_stats() {
    let out = run(&["build", &spec("one_skip.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["L"], 3);
    assert_eq!(v["m"], 25);
    assert_eq!(v["H"], 6);
    assert_eq!(v["path_count"], 40);
    assert_eq!(v["has_skip_edges"], true);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("{\n  \"format_version\": 1,"));
}

#[test]
fn enumerate_lists_paths_and_respects_cap() {
    let out = run(&["enumerate", &spec("two_two_two.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 8);
    assert_eq!(v["paths"][0], serde_json::json!([[0, 1], [1, 1], [2, 1]]));

    let capped = run(&["enumerate", &spec("two_two_two.json"), "--max-paths", "5"]);
    assert_eq!(capped.status.code(), Some(1));
    assert_single_line_error(&capped);
}

#[test]
fn basis_on_three_two_three() {
    let out = run(&["basis", &spec("three_two_three.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cardinality"], 10);
    assert_eq!(v["paths"].as_array().unwrap().len(), 10);
    assert_eq!(v["paths"][0]["origin"], "direct");

    let with_override = run(&[
        "basis",
        &spec("three_two_three.json"),
        "--override",
        &spec("three_two_three_override.json"),
    ]);
    assert_eq!(with_override.status.code(), Some(0));
    assert_eq!(json(&with_override)["cardinality"], 10);
}

#[test]
fn basis_refuses_skip_networks() {
    let out = run(&["basis", &spec("short_skip.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_single_line_error(&out);
    assert!(stderr(&out).contains("hbps"));
}

#[test]
fn hbps_accepts_and_rejects() {
    let out = run(&["hbps", &spec("one_skip.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cardinality"], 19);
    assert_eq!(v["per_substructure"].as_array().unwrap().len(), 2);
    assert_eq!(v["basis"]["cardinality"], 19);

    for name in ["shared_tail.json", "shared_head.json"] {
        let out = run(&["hbps", &spec(name)]);
        assert_eq!(out.status.code(), Some(2));
        assert_eq!(stderr(&out), format!("{SHARED_EDGES_MESSAGE}\n"));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn jobs_do_not_change_output() {
    let a = run(&["hbps", &spec("long_skip.json"), "--seed", "7"]);
    let b = run(&[
        "hbps",
        &spec("long_skip.json"),
        "--seed",
        "7",
        "--jobs",
        "4",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_receives_the_document() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let out = run(&[
        "hbps",
        &spec("short_skip.json"),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&target).unwrap();
    let direct = run(&["hbps", &spec("short_skip.json")]);
    assert_eq!(written.as_bytes(), direct.stdout.as_slice());
}

#[test]
fn verify_passes_and_fails() {
    let out = run(&["verify", &spec("one_skip.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rank"], 19);
    assert_eq!(v["span_checked"], 40);
    assert!(v.get("timings").is_none());

    let bad = run(&[
        "verify",
        &spec("two_two_two.json"),
        "--basis",
        &spec("two_two_two_basis.json"),
    ]);
    assert_eq!(bad.status.code(), Some(3));
    let v = json(&bad);
    assert_eq!(v["cardinality_ok"], false);
    assert_eq!(v["coverage_ok"], false);

    let dir = tempfile::tempdir().unwrap();
    let basis_file = dir.path().join("basis.json");
    let computed = run(&[
        "hbps",
        &spec("short_skip.json"),
        "--output",
        basis_file.to_str().unwrap(),
    ]);
    assert_eq!(computed.status.code(), Some(0));
    let reused = run(&[
        "verify",
        &spec("short_skip.json"),
        "--basis",
        basis_file.to_str().unwrap(),
    ]);
    assert_eq!(reused.status.code(), Some(0));

    let timed = run(&["verify", &spec("two_two_two.json"), "--timings"]);
    assert!(json(&timed).get("timings").is_some());

    let rejected = run(&["verify", &spec("shared_tail.json")]);
    assert_eq!(rejected.status.code(), Some(2));
    assert_eq!(stderr(&rejected), format!("{SHARED_EDGES_MESSAGE}\n"));
}

#[test]
fn represent_p4_against_two_two_two_basis() {
    let out = run(&[
        "represent",
        &spec("two_two_two.json"),
        "--path",
        &spec("two_two_two_target.json"),
        "--basis",
        &spec("two_two_two_basis.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["in_span"], true);
    assert_eq!(v["integer"], true);
    assert_eq!(v["coefficients"], serde_json::json!(["1", "1", "-1"]));

    let inline = run(&[
        "represent",
        &spec("two_two_two.json"),
        "--path",
        "[[0,2],[1,1],[2,1]]",
        "--basis",
        &spec("two_two_two_basis.json"),
    ]);
    assert_eq!(inline.stdout, out.stdout);

    let outside = run(&[
        "represent",
        &spec("two_two_two.json"),
        "--path",
        "[[0,1],[1,2],[2,1]]",
        "--basis",
        &spec("two_two_two_basis.json"),
    ]);
    assert_eq!(outside.status.code(), Some(0));
    assert_eq!(json(&outside)["in_span"], false);

    let invalid = run(&[
        "represent",
        &spec("two_two_two.json"),
        "--path",
        "[[0,1],[2,1]]",
    ]);
    assert_eq!(invalid.status.code(), Some(1));
    assert_single_line_error(&invalid);
}

#[test]
fn summary_format_is_text() {
    let out = run(&["hbps", &spec("one_skip.json"), "--format", "summary"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cardinality 19"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
    let verify = run(&[
        "verify",
        &spec("three_two_three.json"),
        "--format",
        "summary",
    ]);
    assert!(String::from_utf8(verify.stdout)
        .unwrap()
        .contains("result        ok"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["build"],
        vec!["frobnicate", "x.json"],
        vec!["hbps", "missing.json"],
        vec!["hbps", "--deterministic", "--seed", "3", "x.json"],
        vec!["build", "--format", "yaml", "x.json"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert_single_line_error(&out);
    }
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, r#"{"layers": [2, 2], "extra": 1}"#).unwrap();
    let out = run(&["build", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_single_line_error(&out);

    let stray = dir.path().join("stray.json");
    std::fs::write(&stray, r#"{"extras": [{"tail": [1, 1], "head": [2, 1]}]}"#).unwrap();
    let out = run(&[
        "hbps",
        &spec("three_two_three.json"),
        "--override",
        stray.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_single_line_error(&out);
}

#[test]
fn help_and_version_exit_zero() {
    for flag in ["--help", "--version"] {
        let out = run(&[flag]);
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for verb in ["build", "enumerate", "hbps", "verify"] {
        for name in ["three_two_three.json", "one_skip.json", "unbalanced.json"] {
            let a = run(&[verb, &spec(name), "--seed", "7"]);
            let b = run(&[verb, &spec(name), "--seed", "7"]);
            assert_eq!(a.stdout, b.stdout, "{verb} {name}");
        }
    }
}
