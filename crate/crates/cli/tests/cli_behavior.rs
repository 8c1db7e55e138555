//! Exit-code contract and report-shape checks, driven through the real
//! binary.

use std::path::Path;
use std::process::Command;

fn cecoh() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cecoh"))
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn malformed_radii_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = [5, 4]
"#,
    );
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_algebra_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    write(
        &config,
        r#"
[run]
algebra = "heisenberg"
module = "adjoint"
pairs = [[1, 0]]
radii = [2, 3]
"#,
    );
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn expectation_mismatch_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = [3, 4]

[[expectations]]
q = 1
d = 0
h = 5
"#,
    );
    let out = dir.path().join("out");
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // The report is still written for inspection.
    assert!(out.join("scan_report.jsonl").exists());
    assert!(out.join("scan_summary.csv").exists());
}

#[test]
fn replay_window_too_small_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("replay.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = [2, 3]

[replay]
normalization = true
window = 5
fixtures = 1
"#,
    );
    let status = cecoh()
        .args(["replay", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn show_missing_path_exit_2() {
    let status = cecoh()
        .args(["show", "/nonexistent/report.jsonl"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn show_prints_dimension_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "trivial"
pairs = [[2, 0]]
radii = [3, 4]
"#,
    );
    let out = dir.path().join("out");
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let output = cecoh()
        .arg("show")
        .arg(out.join("scan_report.jsonl"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("q"), "header line present");
    assert!(text.lines().any(|l| l.contains('2') && l.contains("true")));
}

#[test]
fn show_cache_key_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[0, 0]]
radii = [2, 3]
"#,
    );
    let out = dir.path().join("out");
    let cache = dir.path().join("cache");
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .arg("--cache")
        .arg(&cache)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    // Every cache file is addressable through `show`.
    let entry = std::fs::read_dir(&cache).unwrap().next().unwrap().unwrap();
    let key = entry
        .path()
        .file_stem()
        .unwrap()
        .to_string_lossy()
        .to_string();
    let output = cecoh()
        .args(["show", &key, "--cache"])
        .arg(&cache)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn custom_algebra_scan_from_file() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("slice.json"),
        r#"{
    "name": "slice",
    "basis": [
        {"id": "-1", "degree": -1},
        {"id": "0", "degree": 0},
        {"id": "1", "degree": 1}
    ],
    "brackets": [
        {"left": "-1", "right": "0", "terms": {"-1": "1"}},
        {"left": "-1", "right": "1", "terms": {"0": "2"}},
        {"left": "0", "right": "1", "terms": {"1": "1"}}
    ]
}"#,
    );
    let config = dir.path().join("scan.toml");
    write(
        &config,
        r#"
[run]
algebra = "custom"
algebra_file = "slice.json"
module = "adjoint"
pairs = [[1, 0]]
radii = [1, 2]

[[expectations]]
q = 1
d = 0
h = 0
"#,
    );
    let status = cecoh()
        .args(["scan", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn replay_succeeds_and_logs_anchored_steps() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("replay.toml");
    write(
        &config,
        r#"
[run]
algebra = "witt"
module = "adjoint"
pairs = [[1, 0]]
radii = [2, 3]
seed = 42

[replay]
normalization = true
window = 8
fixtures = 1
"#,
    );
    let out = dir.path().join("out");
    let status = cecoh()
        .args(["replay", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let log = std::fs::read_to_string(out.join("replay_log.jsonl")).unwrap();
    assert!(log.contains("normalize/case1"));
    assert!(log.contains("normalize/case2/seed(-3,2,-1)"));
    assert!(log.contains("level0/two-zero"));
    assert!(log.contains("level2/discriminant-odd"));
    assert!(log.contains("\"certified_radius\":4"));
    // The normalization fixture is serialized for replays from disk.
    assert!(out.join("fixtures").join("psi3_seed42.json").exists());
}
