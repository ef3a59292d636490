use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::config::Format;
use crate::error::{CliError, Result};

/// A CSV file held in memory, read by header name.
pub struct InputTable {
    origin: String,
    headers: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

impl InputTable {
    pub fn read(path: &Path) -> Result<Self> {
        let origin = path.display().to_string();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Input(format!("cannot read {origin}: {e}")))?;
        let headers = rdr
            .headers()
            .map_err(|e| CliError::Input(format!("{origin}: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = rdr
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::Input(format!("{origin}: {e}")))?;
        Ok(Self { origin, headers, rows })
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.headers.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Input(format!(
                "column `{name}` not found in {} (available: {})",
                self.origin,
                self.headers.join(", ")
            ))
        })?;
        if self.rows.is_empty() {
            return Err(CliError::Input(format!("{} has no data rows", self.origin)));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let raw = row.get(idx).unwrap_or("");
                raw.parse::<f64>().map_err(|_| {
                    CliError::Input(format!(
                        "{}:{}: column `{name}` holds `{raw}`, not a number",
                        self.origin,
                        k + 2
                    ))
                })
            })
            .collect()
    }
}

/// Shortest text that parses back to `v`, with an exponent only for
/// magnitudes outside `[1e-5, 1e16)`.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Numeric table written as CSV or as `{"columns": [...], "rows": [[...]]}`.
#[derive(Debug, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().copied().map(number).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out.into_bytes()
    }

    pub fn encode(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => json_bytes(self),
        }
    }
}

pub fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Numerical(format!("cannot encode JSON: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Writes through a temporary file in `dir` renamed into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let fail = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", dir.join(name).display()));
    std::fs::create_dir_all(dir).map_err(fail)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| fail(e.error))?;
    Ok(path)
}
