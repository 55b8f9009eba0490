use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gplab")).args(args).env_remove("GPLAB_THREADS").output().unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn column(report: &Value, name: &str) -> Vec<String> {
    let idx = report["columns"].as_array().unwrap().iter().position(|c| c == name).unwrap();
    report["rows"].as_array().unwrap().iter().map(|r| r[idx].as_str().unwrap().to_string()).collect()
}

fn distortion_at(report: &Value, n: usize) -> u64 {
    column(report, "distortion")[n].parse().unwrap()
}

#[test]
fn h5_suite_passes() {
    let out = gplab(&["verify", "--suite", "h5", "--n-max", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["rows"].as_array().unwrap().len(), 50);
    let e15: Vec<String> = column(&r, "e15_letters");
    assert_eq!(e15[49], "800");
}

#[test]
fn zero_bound_is_a_config_error() {
    assert_eq!(gplab(&["verify", "--suite", "h5", "--n-max", "0"]).status.code(), Some(2));
    assert_eq!(gplab(&["verify", "--suite", "bs", "--n-max", "63"]).status.code(), Some(2));
    assert_eq!(gplab(&["verify", "--suite", "mather", "--m-max", "0"]).status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(gplab(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(gplab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn bs_suite_reports_exact_small_lengths() {
    let out = gplab(&["verify", "--suite", "bs"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(column(&r, "bfs_length")[..4], ["2", "4", "6", ""]);
    assert_eq!(column(&r, "image_of_zero")[19], "1048576");
}

#[test]
fn mather_suite_reports_k_m() {
    let out = gplab(&["verify", "--suite", "mather", "--n", "0", "--m-max", "30", "--verify-up-to", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let k: Vec<u64> = column(&r, "k_m").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(k, (1..=30).map(|m| 28 * m + 2 * 3 + 14).collect::<Vec<u64>>());
    assert_eq!(column(&r, "commutator_checked")[0], "exact");
}

#[test]
fn certificate_exit_codes() {
    let ok = gplab(&["verify", "--suite", "certificate", "--n", "1", "--k-max", "10"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(column(&json(&ok), "length"), (1..=10).map(|k| k.to_string()).collect::<Vec<_>>());
    // rank zero fails at the second power
    let bad = gplab(&["verify", "--suite", "certificate", "--n", "0"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["passed"], false);
}

#[test]
fn diagonal_suite_runs() {
    let out = gplab(&["verify", "--suite", "diagonal", "--n", "0", "--m-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(column(&json(&out), "b_letters"), ["3", "6", "9"]);
}

#[test]
fn bad_config_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"interval": 3}"#).unwrap();
    let out = gplab(&["verify", "--suite", "diagonal", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = gplab(&["verify", "--suite", "diagonal", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn bs_distortion() {
    let out = gplab(&["distortion", "--group", "bs", "--element", "f", "--radius", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    // g² f g⁻² = f⁴ has five letters
    assert!(distortion_at(&r, 5) >= 4);
}

#[test]
fn h5_distortion() {
    let out = gplab(&["distortion", "--group", "h5-gamma1", "--element", "e35", "--radius", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(distortion_at(&json(&out), 8) >= 4);

    let out = gplab(&["distortion", "--group", "h5-gamma1", "--element", "e25", "--radius", "6"]);
    let r = json(&out);
    for n in 0..=6 {
        assert!(distortion_at(&r, n) <= n as u64);
    }
}

#[test]
fn distortion_errors() {
    let outside = gplab(&["distortion", "--group", "h5-gamma1", "--element", "e12"]);
    assert_eq!(outside.status.code(), Some(2));
    let malformed = gplab(&["distortion", "--group", "h5-full", "--element", "e55"]);
    assert_eq!(malformed.status.code(), Some(2));
    let bs = gplab(&["distortion", "--group", "bs", "--element", "h"]);
    assert_eq!(bs.status.code(), Some(2));
    let budget = gplab(&["distortion", "--group", "h5-full", "--element", "e15", "--radius", "6", "--budget", "100"]);
    assert_eq!(budget.status.code(), Some(1));
    let r = json(&budget);
    assert_eq!(r["passed"], false);
    assert!(r["rows"].as_array().unwrap().is_empty());
}

#[test]
fn rank_of_files() {
    let out = gplab(&["rank", "--input", &data("finite.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!((r["details"]["rank"].as_u64(), r["details"]["final_cardinality"].as_u64()), (Some(0), Some(3)));

    let r = json(&gplab(&["rank", "--input", &data("empty.json")]));
    assert_eq!((r["details"]["rank"].as_u64(), r["details"]["final_cardinality"].as_u64()), (Some(0), Some(0)));
}

#[test]
fn rank_parse_failures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"kind": "finite", "points": ["2/4"]}"#).unwrap();
    assert_eq!(gplab(&["rank", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&path, "not json").unwrap();
    assert_eq!(gplab(&["rank", "--input", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(gplab(&["rank"]).status.code(), Some(2));
}

#[test]
fn f_tilde_document_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("f_tilde.json");
    let out = gplab(&["rank", "--builtin", "f-tilde", "--n", "1", "--emit", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let direct = json(&out);
    assert_eq!(direct["details"]["rank"], 2);
    assert_eq!(direct["details"]["final_cardinality"], 1);

    let again = json(&gplab(&["rank", "--input", doc.to_str().unwrap(), "--emit", dir.path().join("again.json").to_str().unwrap()]));
    assert_eq!(again["details"], direct["details"]);
    assert_eq!(again["rows"], direct["rows"]);
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&doc).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("again.json")).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn json_reports_round_trip() {
    for args in [
        vec!["ball", "--group", "bs", "--radius", "4"],
        vec!["verify", "--suite", "certificate", "--n", "1", "--k-max", "4"],
        vec!["rank", "--builtin", "f1", "--n", "2"],
    ] {
        let out = gplab(&args);
        let v = json(&out);
        let reparsed: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, reparsed);
        for key in ["command", "passed", "columns", "rows", "details", "error"] {
            assert!(v.get(key).is_some(), "{key} missing from {args:?}");
        }
    }
}

#[test]
fn csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_gplab"))
            .args(["verify", "--suite", "diagonal", "--n", "0", "--m-max", "2", "--format", "csv", "--out"])
            .arg(&path)
            .env("GPLAB_THREADS", threads)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("m,f_letters,"));
}

#[test]
fn ball_sphere_sizes() {
    let out = gplab(&["ball", "--group", "bs", "--radius", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "radius,sphere,ball\n0,1,1\n1,4,5\n2,12,17\n3,26,43\n4,50,93\n");
}

#[test]
fn invalid_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_gplab"))
        .args(["ball", "--group", "bs", "--radius", "1"])
        .env("GPLAB_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn explicit_config_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    let config = gplab::constructions::ConstructionConfig::default();
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    let out = gplab(&["verify", "--suite", "diagonal", "--m-max", "1", "--config", path.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
