use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "SEXTIC_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
}

impl Cell {
    /// 17 significant digits, so every f64 survives a text round trip.
    fn text(self) -> String {
        match self {
            Cell::F(v) => format!("{v:.16e}"),
            Cell::I(v) => v.to_string(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::F(v) => json!(v),
            Cell::I(v) => json!(v),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::I(v as i64)
    }
}

/// Build a row from mixed cell types.
#[macro_export]
macro_rules! row {
    ($($v:expr),* $(,)?) => { vec![$($crate::output::Cell::from($v)),*] };
}

/// A command's result: a table plus free-form extras for the sidecar.
#[derive(Debug, Clone)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub result: Value,
    pub tolerances: Value,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Report {
            columns,
            rows: Vec::new(),
            result: Value::Object(Map::new()),
            tolerances: Value::Object(Map::new()),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_result(mut self, v: impl Serialize) -> Self {
        self.result = serde_json::to_value(v).unwrap_or(Value::Null);
        self
    }

    pub fn with_tolerances(mut self, v: Value) -> Self {
        self.tolerances = v;
        self
    }
}

/// Where the data file and its sidecar go.
#[derive(Debug, Clone)]
pub struct Destination {
    pub data: PathBuf,
    pub meta: PathBuf,
    pub format: Format,
}

impl Destination {
    pub fn resolve(out: Option<&Path>, stem: &str, format: Format) -> Self {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let default_name = format!("{stem}.{ext}");
        let data = match out {
            Some(p) if p.is_dir() || p.as_os_str().to_string_lossy().ends_with('/') => {
                p.join(default_name)
            }
            Some(p) => p.to_path_buf(),
            None => {
                let dir =
                    std::env::var_os(OUT_DIR_VAR).map_or_else(|| PathBuf::from("."), PathBuf::from);
                dir.join(default_name)
            }
        };
        let meta = data.with_extension("meta.json");
        Destination { data, meta, format }
    }

    pub fn write_data(&self, report: &Report) -> Result<()> {
        if let Some(dir) = self.data.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(&self.data)
                    .with_context(|| format!("opening {}", self.data.display()))?;
                w.write_record(&report.columns)?;
                for row in &report.rows {
                    w.write_record(row.iter().map(|c| c.text()))?;
                }
                w.flush()?;
            }
            Format::Json => {
                let rows: Vec<Vec<Value>> = report
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|c| c.json()).collect())
                    .collect();
                let body = json!({ "columns": report.columns, "rows": rows });
                fs::write(&self.data, serde_json::to_string_pretty(&body)? + "\n")
                    .with_context(|| format!("writing {}", self.data.display()))?;
            }
        }
        Ok(())
    }

    pub fn write_meta(&self, meta: &Value) -> Result<()> {
        if let Some(dir) = self.meta.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(&self.meta, serde_json::to_string_pretty(meta)? + "\n")
            .with_context(|| format!("writing {}", self.meta.display()))
    }
}
