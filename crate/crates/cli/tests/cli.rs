use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dwset(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwset")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_prints_grammar_and_ids() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dwset(&["list"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["thmA", "thmC-cardioid", "ex8.3", "alpha-probe", "classification", "<family>"] {
        assert!(text.contains(id), "{id} missing from\n{text}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(dwset(&["reproduce", "ex9.9"], tmp.path()).status.code(), Some(2));
    assert_eq!(dwset(&["frobnicate"], tmp.path()).status.code(), Some(2));

    let cfg = write_config(tmp.path(), "typo.toml", "experiment = \"density\"\nsampels = 10\n");
    let out = dwset(&["run", "-c", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2, column 1"), "{}", stderr(&out));

    let cfg = write_config(tmp.path(), "zero.toml", "experiment = \"density\"\nsamples = 0\n");
    let out = dwset(&["run", "-c", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("samples"), "{}", stderr(&out));
}

#[test]
fn low_precision_override_is_a_numeric_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "low.toml",
        "experiment = \"density\"\nsequence = \"ex8.3:a=1-1/n\"\nhorizon = 100\nsamples = 4\nprecision = 156\n",
    );
    let out = dwset(&["run", "-c", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("precision exhausted") && err.contains("hint:"), "{err}");
}

#[test]
fn run_reports_are_byte_identical_across_repeats_and_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "density.toml",
        "experiment = \"density\"\nsequence = \"ex8.3:a=1-1/n\"\nhorizon = 60\nsamples = 40\nseed = 3\n",
    );
    let mut reports = Vec::new();
    for (out, workers) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let o = dwset(&["run", "-c", &cfg, "--out-dir", out, "--workers", workers], tmp.path());
        assert!(o.status.success(), "{}", stderr(&o));
        reports.push(fs::read(tmp.path().join(out).join("density/report.json")).unwrap());
        assert!(tmp.path().join(out).join("density/meta.json").exists());
        assert!(tmp.path().join(out).join("density/density.svg").exists());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
    let report: serde_json::Value = serde_json::from_slice(&reports[0]).unwrap();
    assert!(report["results"]["mean_score"].as_f64().unwrap() > 0.0);
    assert!(report["params"].get("workers").is_none());
}

#[test]
fn flags_override_the_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "st.toml",
        "experiment = \"shrinking-target\"\nmax_index = 8\nhorizon = 30\nsamples = 20\nseed = 1\n",
    );
    let o = dwset(&["run", "-c", &cfg, "--seed", "9", "--samples", "10", "--out-dir", "out"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("out/shrinking-target/report.json")).unwrap()).unwrap();
    assert_eq!(report["params"]["seed"], 9);
    assert_eq!(report["params"]["samples"], 10);
    assert_eq!(report["passed"], true);
    let canonical = fs::read_to_string(tmp.path().join("out/shrinking-target/config.toml")).unwrap();
    assert!(canonical.contains("seed = 9"), "{canonical}");
}

#[test]
fn reproduce_writes_report_and_appends_run_log() {
    let tmp = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let o = dwset(&["reproduce", "loewner", "--out-dir", "r"], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let report = fs::read_to_string(tmp.path().join("r/loewner/report.json")).unwrap();
    assert!(report.contains("\"passed\": true"));
    assert!(tmp.path().join("r/loewner/defects.svg").exists());
    let log = fs::read_to_string(tmp.path().join("r/runs.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 2);
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["experiment"], "loewner");
    }
}

#[test]
fn reproduced_reports_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (out, workers) in [("a", "1"), ("b", "4")] {
        let o = dwset(&["reproduce", "thmD", "--out-dir", out, "--workers", workers], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        reports.push(fs::read(tmp.path().join(out).join("thmD/report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let text = String::from_utf8(reports.pop().unwrap()).unwrap();
    assert!(text.contains("one_escapes") && text.contains("\"fraction\": 0.0"));
}
