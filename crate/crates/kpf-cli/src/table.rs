use std::io::Write;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::Config(format!("format must be csv or json, got {s:?}"))),
        }
    }
}

/// Rows with a fixed column order; `config_hash` and `tol` come last.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
    hash: String,
    tol: f64,
}

pub fn num(v: f64) -> Value {
    // JSON has no infinities; keep them as strings
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or_else(|| Value::String(v.to_string()))
}

pub fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

impl Table {
    pub fn new(columns: &[&'static str], hash: &str, tol: f64) -> Self {
        Table { columns: columns.to_vec(), rows: vec![], hash: hash.to_string(), tol }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn header(&self) -> Vec<&'static str> {
        let mut h = self.columns.clone();
        h.extend(["config_hash", "tol"]);
        h
    }

    fn full_rows(&self) -> impl Iterator<Item = Vec<Value>> + '_ {
        self.rows.iter().map(|r| {
            let mut r = r.clone();
            r.push(Value::String(self.hash.clone()));
            r.push(num(self.tol));
            r
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(self.header()).map_err(csv_err)?;
                for row in self.full_rows() {
                    w.write_record(row.iter().map(cell)).map_err(csv_err)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let header = self.header();
                let rows: Vec<Value> = self
                    .full_rows()
                    .map(|r| Value::Object(header.iter().map(|k| k.to_string()).zip(r).collect::<Map<_, _>>()))
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &rows).map_err(|e| CliError::Io(e.into()))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::new(std::io::ErrorKind::Other, e))
}
