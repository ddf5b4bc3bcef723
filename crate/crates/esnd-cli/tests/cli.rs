//! Integration tests for the `esnd` binary: argument handling, output
//! formats, file writing, and exit codes.

use std::process::{Command, Output};

fn esnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esnd")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn density_text_shows_bracket_and_target() {
    let out = esnd(&["density", "--seq", "finite:1", "--prime-bound", "1e5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("density"), "missing density line:\n{text}");
    assert!(text.contains('[') && text.contains(']'), "bracket not shown:\n{text}");
    assert!(text.contains("met"), "target verdict not shown:\n{text}");
    assert!(text.contains("prime bound     100000"), "sci notation not normalized:\n{text}");
}

#[test]
fn density_json_is_a_consistent_record() {
    let out = esnd(&["density", "--seq", "named:squares", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["sequence"], "named:squares");
    let (lo, point, hi) = (
        v["lo"].as_f64().unwrap(),
        v["point"].as_f64().unwrap(),
        v["hi"].as_f64().unwrap(),
    );
    assert!(lo <= point && point <= hi);
    assert!(v["met"].as_bool().unwrap());
    assert!(v["tail_terms"]["prime_tail_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn density_csv_is_one_header_and_one_row() {
    let out = esnd(&["density", "--seq", "finite:1,2", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "expected header + row:\n{text}");
    assert!(lines[0].starts_with("sequence,lo,hi,point,width"));
    assert!(lines[1].starts_with("\"finite:1,2\","), "descriptor with comma must be quoted");
}

#[test]
fn unmet_width_warns_but_exits_zero() {
    // A width no prime bound of 1e4 can reach.
    let out = esnd(&["density", "--seq", "finite:1", "--prime-bound", "1e4", "--width", "1e-12"]);
    assert!(out.status.success(), "best-effort bracket is still a success");
    assert!(stderr(&out).contains("short of the target"));
    assert!(stdout(&out).contains("not met"));
}

#[test]
fn malformed_descriptor_is_a_usage_error() {
    let out = esnd(&["density", "--seq", "finite:3,1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("error:"), "missing diagnostic:\n{err}");
    assert!(err.contains("descriptors:"), "missing usage hint:\n{err}");
}

#[test]
fn unknown_flags_and_suites_are_usage_errors() {
    assert_eq!(esnd(&["density", "--seq", "finite:1", "--bogus"]).status.code(), Some(2));
    assert_eq!(esnd(&["verify", "lemma5"]).status.code(), Some(2));
    assert_eq!(esnd(&["count", "--seq", "finite:1", "--limit", "necessarily"]).status.code(), Some(2));
}

#[test]
fn out_of_budget_limits_are_computation_errors() {
    let out = esnd(&["enumerate", "--seq", "finite:1", "--limit", "1e9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn enumerate_writes_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("members.txt");
    let out = esnd(&[
        "enumerate",
        "--seq",
        "named:pow2",
        "--limit",
        "40",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty(), "file output must not echo to stdout");
    let listed: Vec<u64> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    // Exponents restricted to powers of two: the cubes 8 and 27 drop out,
    // as do 24 = 2^3*3, 32 = 2^5, and 40 = 2^3*5.
    assert_eq!(listed, vec![1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
        21, 22, 23, 25, 26, 28, 29, 30, 31, 33, 34, 35, 36, 37, 38, 39]);
}

#[test]
fn count_json_nests_the_density_bracket() {
    let out = esnd(&["count", "--seq", "named:odd", "--limit", "1e4", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["x"], 10_000);
    assert_eq!(v["count"], 7_055);
    assert!(v["density"]["lo"].as_f64().unwrap() < v["density"]["hi"].as_f64().unwrap());
    assert!(v["ratio"].as_f64().unwrap() < 1.0);
}

#[test]
fn gaps_csv_roundtrips_through_the_library_reader() {
    let out = esnd(&["gaps", "--max-term", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = esnd::gaps::read_catalog_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[0].left_lo < w[1].left_lo), "rows sorted by left endpoint");
}

#[test]
fn measure_json_labels_the_conjecture_open() {
    let out = esnd(&["measure", "--max-term", "3", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["conjecture_status"], "open");
    assert_eq!(v["gap_count"], 3);
    assert!(v["total_hi"].as_f64().unwrap() < v["ceiling"].as_f64().unwrap());
}

#[test]
fn thread_pinning_does_not_change_results() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_esnd"))
            .env("ESND_THREADS", threads)
            .args(["density", "--seq", "named:fibonacci", "--format", "json"])
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        stdout(&out)
    };
    assert_eq!(run("1"), run("4"), "density output must not depend on the worker count");
}
