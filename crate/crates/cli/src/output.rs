//! CSV and JSON writers. Every number goes through [`fmt_num`], and JSON
//! carries the value of that rounded text, so both formats agree exactly.

use std::io::{self, Write};

use serde_json::{Map, Number, Value};

use crate::config::Emit;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x.into())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// Scientific notation with 9 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // Drop the sign of negative zero.
        format!("{:.8e}", 0.0)
    } else if x.is_finite() {
        format!("{x:.8e}")
    } else {
        x.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => fmt_num(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

/// Column-oriented data: CSV with a header row, or a JSON array of objects.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    fn row_object(&self, row: &[Cell]) -> Value {
        let map: Map<String, Value> = self.header.iter().cloned().zip(row.iter().map(Cell::json)).collect();
        Value::Object(map)
    }

    pub fn write(&self, emit: Emit, w: &mut dyn Write) -> io::Result<()> {
        match emit {
            Emit::Csv => {
                writeln!(w, "{}", self.header.join(","))?;
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
                Ok(())
            }
            Emit::Json => {
                let v = Value::Array(self.rows.iter().map(|r| self.row_object(r)).collect());
                serde_json::to_writer_pretty(&mut *w, &v)?;
                writeln!(w)
            }
        }
    }
}

/// Named scalars: `key,value` CSV lines, or one JSON object.
#[derive(Debug, Clone, Default)]
pub struct Record {
    entries: Vec<(String, Cell)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: impl Into<String>, value: impl Into<Cell>) -> &mut Self {
        self.entries.push((key.into(), value.into()));
        self
    }

    pub fn write(&self, emit: Emit, w: &mut dyn Write) -> io::Result<()> {
        match emit {
            Emit::Csv => {
                writeln!(w, "key,value")?;
                for (k, v) in &self.entries {
                    writeln!(w, "{k},{}", v.csv())?;
                }
                Ok(())
            }
            Emit::Json => {
                let map: Map<String, Value> = self.entries.iter().map(|(k, v)| (k.clone(), v.json())).collect();
                serde_json::to_writer_pretty(&mut *w, &Value::Object(map))?;
                writeln!(w)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.0), "1.00000000e0");
        assert_eq!(fmt_num(-9.9108e-5), "-9.91080000e-5");
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(-0.0), "0.00000000e0");
    }

    #[test]
    fn json_matches_csv_text() {
        let x = 0.123456789123;
        let Value::Number(n) = Cell::Num(x).json() else { panic!() };
        assert_eq!(n.as_f64().unwrap(), fmt_num(x).parse::<f64>().unwrap());
        assert_eq!(Cell::Num(f64::NAN).json(), Value::Null);
    }

    #[test]
    fn table_formats() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Num(0.5), Cell::Empty]);
        let mut csv = Vec::new();
        t.write(Emit::Csv, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "a,b\n5.00000000e-1,\n");
        let mut json = Vec::new();
        t.write(Emit::Json, &mut json).unwrap();
        let v: Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(v[0]["a"], 0.5);
        assert!(v[0]["b"].is_null());
    }
}
