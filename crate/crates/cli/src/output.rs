//! Deterministic CSV and JSON writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

/// 17 significant digits, round-trip exact.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Accumulates rows in memory; written once with `\n` line endings.
pub struct Csv {
    buf: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut csv = Self {
            buf: String::new(),
            width: header.len(),
        };
        csv.line(header.iter().map(|h| h.to_string()));
        csv
    }

    fn line(&mut self, cells: impl IntoIterator<Item = String>) {
        let cells: Vec<String> = cells.into_iter().collect();
        debug_assert_eq!(cells.len(), self.width);
        let _ = writeln!(self.buf, "{}", cells.join(","));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.line(cells);
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.buf).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Output directory plus the list of files written so far.
pub struct OutDir {
    pub root: PathBuf,
    pub files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn csv(&mut self, name: &str, csv: &Csv) -> Result<()> {
        csv.write(&self.root.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<()> {
        write_json(&self.root.join(name), value)?;
        self.files.push(name.to_string());
        Ok(())
    }
}
