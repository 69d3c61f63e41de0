//! Experiment reports and their CSV/JSON serialization.

use std::io::Write;

use serde_json::{json, Map, Value};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// One table cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            // bitwise, so NaN cells compare equal to themselves
            (Self::Float(a), Self::Float(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            (Self::Int(a), Self::Int(b)) => a == b,
            (Self::Text(a), Self::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl Cell {
    /// CSV rendering: floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Self::Float(v) if v.is_nan() => "NaN".into(),
            Self::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Self::Float(v) => format!("{v:.16e}"),
            Self::Int(v) => v.to_string(),
            Self::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            // JSON has no non-finite numbers; they become null
            Self::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Self::Int(v) => Value::from(*v),
            Self::Text(s) => Value::from(s.as_str()),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Null => Ok(Self::Float(f64::NAN)),
            Value::Number(n) if n.is_i64() => Ok(Self::Int(n.as_i64().unwrap())),
            Value::Number(n) => Ok(Self::Float(n.as_f64().unwrap_or(f64::NAN))),
            Value::String(s) => Ok(Self::Text(s.clone())),
            other => Err(parse_error(format!("unexpected cell {other}"))),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Float(v) => Some(*v),
            Self::Int(v) => Some(*v as f64),
            Self::Text(_) => None,
        }
    }
}

fn parse_error(reason: String) -> Error {
    Error::Parse { line: 0, reason }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    pub duration_seconds: f64,
}

/// Result of one experiment run: the config, a table with fixed columns,
/// scalar summaries and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered `(name, value)` pairs.
    pub summary: Vec<(String, f64)>,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[j]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.clone(), Cell::Float(*v).to_json()))
            .collect();
        json!({
            "config": serde_json::to_value(&self.config).expect("config serializes"),
            "rows": rows,
            "summary": summary,
            "provenance": serde_json::to_value(&self.provenance).expect("provenance serializes"),
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("report serializes");
        s.push('\n');
        s
    }

    /// Inverse of [`Self::to_json_string`]. Columns come from the first row,
    /// so a report without rows has no columns.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| parse_error(e.to_string()))?;
        let field = |k: &str| v.get(k).ok_or_else(|| parse_error(format!("missing key '{k}'")));
        let config =
            serde_json::from_value(field("config")?.clone()).map_err(|e| parse_error(e.to_string()))?;
        let provenance =
            serde_json::from_value(field("provenance")?.clone()).map_err(|e| parse_error(e.to_string()))?;
        let raw_rows = field("rows")?
            .as_array()
            .ok_or_else(|| parse_error("rows must be an array".into()))?;
        let columns: Vec<String> = match raw_rows.first() {
            Some(Value::Object(o)) => o.keys().cloned().collect(),
            Some(_) => return Err(parse_error("rows must be objects".into())),
            None => Vec::new(),
        };
        let mut rows = Vec::with_capacity(raw_rows.len());
        for r in raw_rows {
            let o = r
                .as_object()
                .ok_or_else(|| parse_error("rows must be objects".into()))?;
            if o.len() != columns.len() || !o.keys().zip(&columns).all(|(a, b)| a == b) {
                return Err(parse_error("rows have differing columns".into()));
            }
            rows.push(o.values().map(Cell::from_json).collect::<Result<Vec<_>>>()?);
        }
        let summary = field("summary")?
            .as_object()
            .ok_or_else(|| parse_error("summary must be an object".into()))?
            .iter()
            .map(|(k, v)| match v {
                Value::Null => Ok((k.clone(), f64::NAN)),
                Value::Number(n) => Ok((k.clone(), n.as_f64().unwrap_or(f64::NAN))),
                _ => Err(parse_error(format!("summary entry '{k}' is not a number"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            columns,
            rows,
            summary,
            provenance,
        })
    }

    /// `name = value` lines for the terminal.
    pub fn summary_text(&self) -> String {
        let mut s = format!("experiment = {}\n", self.config.experiment);
        for (k, v) in &self.summary {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}
