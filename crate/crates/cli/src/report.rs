use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // non-finite reals have no JSON form
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Experiment-level quantities, emitted in JSON only.
    pub summary: Option<Value>,
}

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Report {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
        match cfg.format {
            Format::Csv => self.csv(),
            Format::Json => self.json(cfg),
        }
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    fn json(&self, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.clone(), v.json_value()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut meta = json!({
            "config": cfg,
            "version": env!("CARGO_PKG_VERSION"),
        });
        if let Some(s) = &self.summary {
            meta["summary"] = s.clone();
        }
        let mut out = serde_json::to_vec_pretty(&json!({ "meta": meta, "rows": rows }))?;
        out.push(b'\n');
        Ok(out)
    }
}
