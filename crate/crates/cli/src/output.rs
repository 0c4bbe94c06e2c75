use std::io::Write;

use serde_json::{Map, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    /// exact rational as `p/q`
    Rational(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(csv_cell)).map_err(io)?;
                }
                w.flush().map_err(|e| CliError::Io(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), json_cell(v))).collect();
                        Value::Object(obj)
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &rows).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out).map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Float(v) => fmt17(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) | Cell::Rational(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Float(v) if v.is_finite() => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Float(v) => Value::String(fmt17(*v)),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) | Cell::Rational(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

/// 17 significant digits, positional for moderate exponents.
pub fn fmt17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (_, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let decimals = (16 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt17(1.3888888888888888), "1.3888888888888888");
        assert_eq!(fmt17(2.5e-9), "2.5000000000000001e-9");
        assert_eq!(fmt17(0.0), "0");
        assert_eq!(fmt17(-12.5), "-12.500000000000000");
        for v in [0.1, 1.0 / 7.0, 6.02e23, -3.3e-7, 123456.789] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(&["name", "value", "exact"]);
        t.push(vec!["a,b".into(), 0.5.into(), Cell::Rational("1/360".into())]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value,exact\n\"a,b\",0.50000000000000000,1/360\n");
        let mut buf = Vec::new();
        t.write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["exact"], "1/360");
        assert_eq!(v[0]["value"], 0.5);
    }
}
