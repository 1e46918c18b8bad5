//! CSV emission and run records.

use std::io::Write;
use std::path::{Path, PathBuf};

use modwave::{Error, PhysicsConstants, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;

/// Column-oriented CSV body.
pub struct Table {
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self { columns: Vec::new(), data: Vec::new() }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) {
        self.columns.push(name.to_string());
        self.data.push(values);
    }

    /// `# <header json>`, the column names, then one row per sample with 17
    /// significant digits and LF endings.
    pub fn write<W: Write>(&self, mut out: W, header: &serde_json::Value) -> Result<()> {
        writeln!(out, "# {header}")?;
        writeln!(out, "{}", self.columns.join(","))?;
        let rows = self.data.first().map_or(0, Vec::len);
        let mut line = String::new();
        for i in 0..rows {
            line.clear();
            for (j, col) in self.data.iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_num(col[i]));
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".to_string()
    }
}

/// Provenance embedded in every CSV header.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance<'a, T: Serialize> {
    pub command: &'a str,
    pub config: &'a T,
    pub constants: PhysicsConstants,
    pub version: &'static str,
}

pub fn header<T: Serialize>(command: &str, config: &T, constants: PhysicsConstants) -> serde_json::Value {
    serde_json::to_value(Provenance { command, config, constants, version: modwave::VERSION })
        .expect("provenance is plain data")
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord<'a> {
    pub command: &'a str,
    pub config: &'a ScenarioConfig,
    pub version: &'static str,
    pub constants: PhysicsConstants,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<OutputDigest> {
    let bytes = std::fs::read(path)?;
    Ok(OutputDigest { path: path.to_path_buf(), sha256: sha256_hex(&bytes) })
}

/// `<path>.<suffix>` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_run_record(
    command: &str,
    config: &ScenarioConfig,
    constants: PhysicsConstants,
    outputs: &[&Path],
    dest: &Path,
) -> Result<()> {
    let timestamp =
        std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let record = RunRecord {
        command,
        config,
        version: modwave::VERSION,
        constants,
        timestamp,
        outputs: outputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
    };
    let text = serde_json::to_string_pretty(&record).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(dest, text + "\n")?;
    Ok(())
}
