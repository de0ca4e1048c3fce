//! Tabular artifacts and the run manifest.
//!
//! Floats are written in their shortest round-trip decimal form, so reading
//! a file back reproduces every value bit for bit.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::Format;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(format!("{x:?}")),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(
            row.len(),
            self.columns.len(),
            "row width in table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(vec![]);
        let fail = |e: csv::Error| Error::Numerical {
            time: 0.0,
            reason: format!("csv encoding of {}: {e}", self.name),
        };
        w.write_record(&self.columns).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(fail)?;
        }
        w.into_inner().map_err(|e| fail(e.into_error().into()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    /// Writes `<dir>/<name>.<ext>` and returns the path.
    pub fn write(&self, dir: &Path, format: Format) -> Result<PathBuf> {
        let (ext, bytes) = match format {
            Format::Csv => ("csv", self.to_csv()?),
            Format::Json => {
                let mut b = serde_json::to_vec_pretty(&self.to_json()).expect("table serializes");
                b.push(b'\n');
                ("json", b)
            }
        };
        let path = dir.join(format!("{}.{ext}", self.name));
        std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub config_path: String,
    pub config_sha256: String,
    pub format: &'static str,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
    pub summary: Value,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut b = serde_json::to_vec_pretty(self).expect("manifest serializes");
        b.push(b'\n');
        std::fs::write(&path, b).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
