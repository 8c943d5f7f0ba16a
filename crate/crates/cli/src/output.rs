use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;

/// Provenance block written at the top of every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
}

impl Header {
    pub fn new(command: &str, config_hash: String) -> Self {
        Header { tool: "exact-wkb", version: env!("CARGO_PKG_VERSION"), command: command.to_string(), config_hash }
    }

    fn csv_lines(&self) -> String {
        format!("# {} {} command={} config_hash={}\n", self.tool, self.version, self.command, self.config_hash)
    }
}

pub struct OutDir {
    pub dir: PathBuf,
    pub header: Header,
    pub written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path, header: Header) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(OutDir { dir: dir.to_path_buf(), header, written: Vec::new() })
    }

    pub fn json(&mut self, name: &str, data: &impl Serialize) -> Result<(), CliError> {
        let v = json!({ "header": self.header, "data": serde_json::to_value(data).map_err(|e| CliError::Config(e.to_string()))? });
        let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        fs::write(self.dir.join(name), text)?;
        self.written.push(name.to_string());
        Ok(())
    }

    /// CSV with a `#` header line; `body` is the column line plus rows.
    pub fn csv(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let mut text = self.header.csv_lines();
        text.push_str(body);
        fs::write(self.dir.join(name), text)?;
        self.written.push(name.to_string());
        Ok(())
    }
}

pub fn csv_table(columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = columns.join(",");
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

pub fn f(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}
