use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};

/// A named rectangular table of JSON scalars.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command produces. Serialized in field order.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub summary: Value,
    pub tables: Vec<Table>,
}

/// Non-finite floats become strings so nothing is lost to `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(format!("{v}")), Value::Number)
}

pub fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_csv<W: Write>(table: &Table, w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.columns)?;
    for row in &table.rows {
        out.write_record(row.iter().map(cell))?;
    }
    out.flush()
}

fn header(report: &Report) -> Value {
    serde_json::json!({
        "command": report.command,
        "config": report.config,
        "summary": report.summary,
    })
}

/// Writes the report to stdout, a JSON file, or a directory of CSV files
/// plus `summary.json`.
pub fn emit(report: &Report) -> std::io::Result<()> {
    let cfg = &report.config;
    match (cfg.format, &cfg.out) {
        (Format::Json, None) => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)
        }
        (Format::Json, Some(path)) => {
            let path = if path.is_dir() {
                path.join(format!("{}.json", report.command))
            } else {
                path.clone()
            };
            create_parent(&path)?;
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            serde_json::to_writer_pretty(&mut f, report)?;
            writeln!(f)?;
            f.flush()
        }
        (Format::Csv, None) => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "# {}", serde_json::to_string(&header(report))?)?;
            for t in &report.tables {
                writeln!(out, "# table {}", t.name)?;
                write_csv(t, &mut out)?;
            }
            Ok(())
        }
        (Format::Csv, Some(dir)) => {
            std::fs::create_dir_all(dir)?;
            for t in &report.tables {
                let f = std::fs::File::create(dir.join(format!("{}.csv", t.name)))?;
                write_csv(t, std::io::BufWriter::new(f))?;
            }
            let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("summary.json"))?);
            serde_json::to_writer_pretty(&mut f, &header(report))?;
            writeln!(f)?;
            f.flush()
        }
    }
}

fn create_parent(path: &Path) -> std::io::Result<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => std::fs::create_dir_all(p),
        _ => Ok(()),
    }
}
