//! Report rendering.
//!
//! JSON: `{"params": .., "method": .., "data": [..], "meta": {..}}` with
//! floats written as numbers carrying 17 significant digits. CSV: the `data`
//! rows under a header line, same number formatting.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{HeunError, Result};
use crate::scalar::{format_f64, ArithmeticMode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => float_value(*x),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_f64(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

/// A JSON number with 17 significant digits; non-finite values become strings.
pub fn float_value(x: f64) -> Value {
    let text = format_f64(x);
    match Number::from_str(&text) {
        Ok(n) if x.is_finite() => Value::Number(n),
        _ => Value::String(text),
    }
}

/// Column names for a scalar: `name` in exact mode, `name` and `name_im` in
/// float mode (`name` then holds the real part).
pub fn scalar_columns<S: Scalar>(name: &str) -> Vec<String> {
    match S::MODE {
        ArithmeticMode::Exact => vec![name.to_string()],
        ArithmeticMode::Float => vec![name.to_string(), format!("{name}_im")],
    }
}

pub fn scalar_cells<S: Scalar>(x: &S) -> Vec<Cell> {
    match S::MODE {
        ArithmeticMode::Exact => vec![Cell::Text(x.render())],
        ArithmeticMode::Float => {
            let c = x.to_complex();
            vec![Cell::Float(c.re), Cell::Float(c.im)]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub params: Value,
    pub method: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
    /// 0 unless the command's own check failed.
    pub exit_code: i32,
}

impl Report {
    pub fn new(params: Value, method: Value, columns: Vec<String>) -> Self {
        Report {
            params,
            method,
            columns,
            rows: Vec::new(),
            meta: Map::new(),
            exit_code: 0,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.meta.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> Value {
        let data = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::to_json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("params".to_string(), self.params.clone());
        top.insert("method".to_string(), self.method.clone());
        top.insert("data".to_string(), Value::Array(data));
        top.insert("meta".to_string(), Value::Object(self.meta.clone()));
        Value::Object(top)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json())
                    .map_err(|e| HeunError::Numerical(format!("JSON encoding failed: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let fail = |e: csv::Error| HeunError::Numerical(format!("CSV encoding failed: {e}"));
                w.write_record(&self.columns).map_err(fail)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::to_csv)).map_err(fail)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| HeunError::Numerical(format!("CSV encoding failed: {e}")))?;
                Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
            }
        }
    }
}
