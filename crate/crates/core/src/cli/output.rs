//! Comma-separated result tables with a `#` metadata header.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Header lines carrying the canonical configuration start with this.
pub const CONFIG_PREFIX: &str = "# config| ";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Extra `# key: value` lines.
    pub meta: Vec<(String, String)>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::param(
                "row",
                format!("{} has {} columns, row has {}", self.name, self.columns.len(), row.len()),
            ));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::numerical("result table", format!("non-finite entry {v} in {}", self.name)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// The full file contents.
    pub fn render(&self, header: &Header<'_>) -> String {
        let mut s = String::new();
        s.push_str(&format!("# fracns {}\n", env!("CARGO_PKG_VERSION")));
        s.push_str(&format!("# subcommand: {}\n", header.subcommand));
        s.push_str(&format!("# table: {}\n", self.name));
        s.push_str(&format!("# seed: {}\n", header.seed));
        s.push_str(&format!("# config_sha256: {}\n", header.hash));
        for (k, v) in &self.meta {
            s.push_str(&format!("# {k}: {v}\n"));
        }
        for line in header.canonical.lines() {
            s.push_str(CONFIG_PREFIX);
            s.push_str(line);
            s.push('\n');
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

pub struct Header<'a> {
    pub subcommand: &'a str,
    pub seed: u64,
    pub hash: &'a str,
    pub canonical: &'a str,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and an atomic rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| io_error(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}
