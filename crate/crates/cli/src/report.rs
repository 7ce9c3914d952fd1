//! Report files: `report.json` holds only deterministic content, while
//! timing and invocation details go to `meta.json` and the run log.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dwset::experiments::{append_run_log, RunRecord};
use serde::Serialize;
use serde_json::{json, Value};

pub const RUN_LOG: &str = "runs.jsonl";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub sequence_id: String,
    pub params: Value,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub results: Value,
}

/// A report under construction plus its plots.
pub struct Artifacts {
    pub name: String,
    pub sequence_id: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub results: serde_json::Map<String, Value>,
    /// `(file name, contents)`: plots and other side files.
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn new(name: &str, sequence_id: &str, params: Value) -> Self {
        Self {
            name: name.into(),
            sequence_id: sequence_id.into(),
            params,
            checks: Vec::new(),
            results: serde_json::Map::new(),
            files: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.into(), serde_json::to_value(value).expect("results serialise to JSON"));
    }

    pub fn plot(&mut self, file: &str, svg: String) {
        self.attach(file, svg);
    }

    pub fn attach(&mut self, file: &str, text: String) {
        self.files.push((file.into(), text));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn report(&self) -> Report {
        Report {
            name: self.name.clone(),
            sequence_id: self.sequence_id.clone(),
            params: self.params.clone(),
            passed: self.passed(),
            checks: self.checks.clone(),
            results: Value::Object(self.results.clone()),
        }
    }

    /// Writes `<out>/<name>/report.json`, `meta.json` and the side files, and
    /// appends a line to `<out>/runs.jsonl`. Returns the report directory.
    pub fn write(&self, out: &Path, command: &str, wall_time: f64) -> io::Result<PathBuf> {
        let dir = out.join(&self.name);
        fs::create_dir_all(&dir)?;
        let report = self.report();
        fs::write(dir.join("report.json"), to_json(&report)? + "\n")?;
        for (file, text) in &self.files {
            fs::write(dir.join(file), text)?;
        }
        let finished = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let meta = json!({
            "command": command,
            "finished_unix": finished,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_time_s": wall_time,
        });
        fs::write(dir.join("meta.json"), to_json(&meta)? + "\n")?;
        let record = RunRecord {
            experiment: self.name.clone(),
            sequence_id: self.sequence_id.clone(),
            params: self.params.clone(),
            seed: self.params.get("seed").and_then(Value::as_u64),
            results: json!({
                "passed": report.passed,
                "checks": report.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
            }),
            wall_time,
        };
        append_run_log(&out.join(RUN_LOG), &record)?;
        Ok(dir)
    }
}

fn to_json(v: &impl Serialize) -> io::Result<String> {
    serde_json::to_string_pretty(v).map_err(io::Error::other)
}
