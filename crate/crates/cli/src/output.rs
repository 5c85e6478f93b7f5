//! Result artifacts, run manifests and the `out/<command>/<hash>/` layout.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Rows of string cells under a header.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("cells are UTF-8"))
    }

    /// One JSON object per row, keyed by the header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(r)
                        .map(|(h, c)| (h.clone(), Value::String(c.clone())))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Json(Value),
    Csv(String),
}

impl Artifact {
    pub fn file_name(&self) -> &'static str {
        match self {
            Artifact::Json(_) => "result.json",
            Artifact::Csv(_) => "result.csv",
        }
    }

    pub fn render(&self) -> String {
        match self {
            Artifact::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Artifact::Csv(s) => s.clone(),
        }
    }
}

/// One named step of a run. Only `name`, `passed` and `detail` are part of
/// the deterministic record; `elapsed` goes to the manifest alone.
#[derive(Debug, Clone)]
pub struct Stage {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
    pub elapsed: Duration,
}

/// What a command produced, before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub artifact: Artifact,
    pub stages: Vec<Stage>,
    /// False when a deterministic check failed.
    pub ok: bool,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Canonical arguments with every default filled in; replaying them
    /// reproduces the result file.
    pub argv: Vec<String>,
    pub params: Map<String, Value>,
    pub seeds: Vec<u64>,
    pub artifact_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub stages: Vec<StageRecord>,
    pub outputs: Vec<String>,
    pub result_sha256: String,
    pub ok: bool,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the canonical argument list, used as the run directory name.
pub fn params_hash(argv: &[String]) -> String {
    sha256_hex(argv.join("\u{0}").as_bytes())[..16].to_string()
}

/// `--flag value` pairs after the positional words become a parameter map.
pub fn params_map(argv: &[String]) -> Map<String, Value> {
    let mut m = Map::new();
    let mut it = argv.iter().skip_while(|a| !a.starts_with("--")).peekable();
    while let Some(flag) = it.next() {
        let key = flag.trim_start_matches("--").to_string();
        let value = match it.peek() {
            Some(v) if !v.starts_with("--") => Value::String(it.next().unwrap().clone()),
            _ => Value::Bool(true),
        };
        m.insert(key, value);
    }
    let positional: Vec<Value> = argv
        .iter()
        .take_while(|a| !a.starts_with("--"))
        .map(|a| Value::String(a.clone()))
        .collect();
    m.insert("positional".into(), Value::Array(positional));
    m
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Root for run directories: `--out`, then `SIGNDEG_OUT`, then `./out`.
pub fn out_root(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os("SIGNDEG_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes `result.*` and `manifest.json`; returns the run directory.
pub fn write_run(
    root: &Path,
    command: &str,
    argv: &[String],
    outcome: &Outcome,
    started: u128,
) -> Result<PathBuf, CliError> {
    let dir = root.join(command).join(params_hash(argv));
    fs::create_dir_all(&dir)?;
    let body = outcome.artifact.render();
    let result = dir.join(outcome.artifact.file_name());
    fs::write(&result, &body)?;
    let manifest = RunManifest {
        command: command.to_string(),
        argv: argv.to_vec(),
        params: params_map(&argv[1..]),
        seeds: outcome.seeds.clone(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        stages: outcome
            .stages
            .iter()
            .map(|s| StageRecord {
                name: s.name.clone(),
                passed: s.passed,
                detail: s.detail.clone(),
                seconds: s.elapsed.as_secs_f64(),
            })
            .collect(),
        outputs: vec![outcome.artifact.file_name().to_string(), "manifest.json".to_string()],
        result_sha256: sha256_hex(body.as_bytes()),
        ok: outcome.ok,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(dir)
}

/// JSON object with fixed keys; a small helper for result documents.
pub fn doc(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn verdict(ok: bool) -> Value {
    json!(if ok { "pass" } else { "fail" })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1/2".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1/2,\"x,y\"\n");
    }

    #[test]
    fn params_from_argv() {
        let argv: Vec<String> = ["resheto", "--n", "14", "--seeds", "0..9"].iter().map(|s| s.to_string()).collect();
        let m = params_map(&argv);
        assert_eq!(m["n"], json!("14"));
        assert_eq!(m["positional"], json!(["resheto"]));
        assert_eq!(params_hash(&argv), params_hash(&argv.clone()));
        assert_eq!(params_hash(&argv).len(), 16);
    }
}
