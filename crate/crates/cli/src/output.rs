//! Tabular output as CSV (with `#` metadata lines) or JSON lines (metadata
//! object first). Floats carry 17 significant digits; nothing depends on the
//! clock unless stamping is requested.

use crate::config::Format;
use crate::CliError;
use serde_json::{Map, Value};
use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Cell {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Float)
    }
}

/// Rows plus ordered metadata; `flagged` counts rows with numerical failures.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
    pub flagged: usize,
}

impl Table {
    pub fn new(command: &str, columns: Vec<&'static str>) -> Table {
        let mut meta = Map::new();
        meta.insert("command".into(), command.into());
        meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        meta.insert("units".into(), "hbar = 2m = 1; g = 16 pi a rho0; r~ = sqrt(g) r; tau = g t".into());
        Table { columns, meta, ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<Cell>, flagged: bool) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.flagged += usize::from(flagged);
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: impl Write) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_csv(&self, mut out: impl Write) -> Result<(), CliError> {
        for (k, v) in &self.meta {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_jsonl(&self, mut out: impl Write) -> Result<(), CliError> {
        let mut head = self.meta.clone();
        head.insert("columns".into(), self.columns.iter().map(|c| Value::from(*c)).collect());
        serde_json::to_writer(
            &mut out,
            &Value::Object(Map::from_iter([("metadata".to_string(), Value::Object(head))])),
        )?;
        writeln!(out)?;
        for row in &self.rows {
            let rec: Map<String, Value> =
                self.columns.iter().map(|c| c.to_string()).zip(row.iter().map(Cell::json)).collect();
            serde_json::to_writer(&mut out, &rec)?;
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }
}
