//! Run directories and the self-contained run record.
//!
//! Every invocation that produces artifacts gets its own directory: either
//! the explicit `--out` path or a timestamped directory under the output
//! root (`NSN_DDU_OUT` or `./runs`). The run record echoes the full scenario
//! and configuration so a run can be reproduced from its directory alone;
//! timestamps live only here, never in the numeric artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub artifact_version: String,
    pub command: String,
    pub scenario_path: String,
    /// Full echo of the input document.
    pub scenario: serde_json::Value,
    pub config: serde_json::Value,
    pub started_utc: String,
    pub finished_utc: String,
    pub outputs: Vec<String>,
}

pub struct RunDir {
    pub path: PathBuf,
    record: RunRecord,
}

impl RunDir {
    /// Creates the run directory and an open record for it.
    pub fn create(
        command: &str,
        out: Option<&Path>,
        scenario_path: &Path,
        scenario_text: &str,
        config: serde_json::Value,
    ) -> io::Result<RunDir> {
        let path = match out {
            Some(p) => {
                fs::create_dir_all(p)?;
                p.to_path_buf()
            }
            None => {
                let root = std::env::var_os("NSN_DDU_OUT")
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from("runs"));
                let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
                let mut k = 0u32;
                loop {
                    let name = if k == 0 {
                        format!("{command}-{stamp}")
                    } else {
                        format!("{command}-{stamp}-{k}")
                    };
                    let candidate = root.join(name);
                    if !candidate.exists() {
                        fs::create_dir_all(&candidate)?;
                        break candidate;
                    }
                    k += 1;
                }
            }
        };
        let scenario: serde_json::Value =
            serde_json::from_str(scenario_text).unwrap_or(serde_json::Value::Null);
        let record = RunRecord {
            artifact_version: ARTIFACT_VERSION.to_string(),
            command: command.to_string(),
            scenario_path: scenario_path.display().to_string(),
            scenario,
            config,
            started_utc: chrono::Utc::now().to_rfc3339(),
            finished_utc: String::new(),
            outputs: Vec::new(),
        };
        Ok(RunDir { path, record })
    }

    /// Writes an artifact file and registers it in the record.
    pub fn write(&mut self, name: &str, contents: &str) -> io::Result<()> {
        fs::write(self.path.join(name), contents)?;
        self.record.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut body = serde_json::to_string_pretty(value).expect("serializable artifact");
        body.push('\n');
        self.write(name, &body)
    }

    /// Stamps the end time and persists `run.json`.
    pub fn finalize(mut self) -> io::Result<PathBuf> {
        self.record.finished_utc = chrono::Utc::now().to_rfc3339();
        self.record.outputs.push("run.json".to_string());
        let body = serde_json::to_string_pretty(&self.record).expect("record serializes");
        fs::write(self.path.join("run.json"), body + "\n")?;
        Ok(self.path)
    }
}
