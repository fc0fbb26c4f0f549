//! CSV emission: comma-separated, `#`-prefixed comment header lines, LF
//! endings, atomic per-file writes (temp file + rename). Identical
//! configuration and seed produce byte-identical files (no timestamps).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

pub struct CsvWriter {
    buf: String,
    path: PathBuf,
}

impl CsvWriter {
    pub fn new(dir: &Path, name: &str, seed: u64, comments: &[(&str, String)]) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# seed = {seed}");
        for (k, v) in comments {
            let _ = writeln!(buf, "# {k} = {v}");
        }
        Self {
            buf,
            path: dir.join(name),
        }
    }

    pub fn header(&mut self, columns: &[&str]) {
        let _ = writeln!(self.buf, "{}", columns.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    /// Atomic write: the file appears fully formed or not at all.
    pub fn finish(self) -> Result<PathBuf> {
        let tmp = self.path.with_extension("csv.tmp");
        fs::write(&tmp, self.buf.as_bytes())
            .with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &self.path)
            .with_context(|| format!("renaming into {}", self.path.display()))?;
        Ok(self.path)
    }
}

/// Atomic JSON artifact write.
pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    let path = dir.join(name);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string_pretty(value)?.as_bytes())
        .with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(path)
}

/// Format a float with full round-trip precision.
pub fn f(x: f64) -> String {
    format!("{x}")
}
