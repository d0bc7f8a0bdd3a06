//! Output helpers: value formatting, atomic file writes, run manifests.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Render with 15 significant digits, plain decimal where readable.
pub fn format_sig15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.14e}");
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let plain = format!("{v:.decimals$}");
        let trimmed = plain.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        sci
    }
}

/// Fail fast when an output path cannot possibly be written (manifest paths
/// are validated before any computation starts).
pub fn validate_output_path(path: &Path) -> io::Result<()> {
    match path.parent() {
        None => Ok(()),
        Some(parent) if parent.as_os_str().is_empty() || parent.is_dir() => Ok(()),
        Some(parent) => Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("output directory {} does not exist", parent.display()),
        )),
    }
}

/// Write via a temporary sibling and rename, so failures leave no partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// Reproducibility record embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub tolerances: serde_json::Value,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        Self {
            schema_version: 1,
            subcommand: subcommand.to_string(),
            parameters: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            tolerances: serde_json::Value::Null,
            seed: None,
        }
    }

    pub fn compact_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }
}
