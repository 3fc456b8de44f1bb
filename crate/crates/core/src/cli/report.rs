use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

/// One command's rows, parameters and verdicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub summary: BTreeMap<String, Value>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl ExperimentReport {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            parameters: BTreeMap::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            verdicts: Vec::new(),
            wall_time_seconds: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.summary.insert(key.to_string(), value.into());
        self
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn verdict(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict::new(name, pass, detail));
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }

    /// Writes `<command>.csv` and `<command>.json` into `dir`.
    pub fn write_to(&self, dir: &Path) -> io::Result<(PathBuf, PathBuf)> {
        let csv_path = dir.join(format!("{}.csv", self.command));
        let json_path = dir.join(format!("{}.json", self.command));
        write_atomic(&csv_path, self.to_csv().as_bytes())?;
        write_atomic(&json_path, self.to_json().as_bytes())?;
        Ok((csv_path, json_path))
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
