//! Output directory management and deterministic text artifacts.
//!
//! Numeric artifacts (CSV tables, text scalars, checkpoints) contain no
//! timestamps or durations, so two runs with the same configuration and seed
//! produce byte-identical files. Wall-clock timings go to `manifest.json`
//! only.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{io_err, CliError, Result};

/// A prepared output directory.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    /// Create the directory, refusing to touch an existing non-empty one
    /// unless `force` is set (in which case it is replaced wholesale).
    pub fn prepare(path: &Path, force: bool) -> Result<Self> {
        if path.exists() {
            let occupied = path.is_dir()
                && path.read_dir().map_err(|e| io_err(path, e))?.next().is_some();
            if !path.is_dir() || occupied {
                if !force {
                    return Err(CliError::Config(format!(
                        "output path '{}' already exists; pass --force to replace it",
                        path.display()
                    )));
                }
                if path.is_dir() {
                    std::fs::remove_dir_all(path).map_err(|e| io_err(path, e))?;
                } else {
                    std::fs::remove_file(path).map_err(|e| io_err(path, e))?;
                }
            }
        }
        std::fs::create_dir_all(path).map_err(|e| io_err(path, e))?;
        Ok(OutDir { root: path.to_path_buf() })
    }

    /// Absolute-or-relative path of a file inside the directory.
    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Write a text artifact.
    pub fn write_text(&self, name: &str, text: &str) -> Result<()> {
        let path = self.file(name);
        std::fs::write(&path, text).map_err(|e| io_err(&path, e))
    }

    /// Write a JSON artifact with sorted keys and a trailing newline.
    pub fn write_json(&self, name: &str, value: &Value) -> Result<()> {
        let text = format!("{}\n", serde_json::to_string_pretty(value).expect("valid json"));
        self.write_text(name, &text)
    }
}

/// Incremental CSV builder.
#[derive(Debug)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    /// Start a table with the given header.
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv { text, columns: header.len() }
    }

    /// Append one row; the cell count must match the header.
    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "CSV row width mismatch");
        let mut first = true;
        for cell in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(cell);
        }
        self.text.push('\n');
    }

    /// The finished table.
    pub fn into_text(self) -> String {
        self.text
    }
}

/// Render an optional number, leaving the cell empty for `None`.
pub fn opt_cell(value: Option<f64>) -> String {
    match value {
        Some(x) => crate::config::fmt_f64(x),
        None => String::new(),
    }
}

/// Format a duration in seconds for the manifest.
pub fn seconds(value: std::time::Duration) -> f64 {
    value.as_secs_f64()
}
