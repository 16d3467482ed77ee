//! Tabular results and their CSV / JSON encodings.
//!
//! Floats are rendered with 12 significant digits in both encodings, so a
//! CSV file and a JSON file of the same table parse to identical values.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::Error;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter {
                name: "format",
                reason: format!("expected `csv` or `json`, got `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(u64),
    Float(f64),
    Bool(bool),
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

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_significant(*x, SIGNIFICANT_DIGITS),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Number::from_f64(round_significant(*x, SIGNIFICANT_DIGITS))
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(format_significant(*x, SIGNIFICANT_DIGITS))),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// `x` with `digits` significant digits, in the style of C's `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("exponent marker");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let body: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exponent < -5 || exponent >= digits as i32 {
        let (lead, rest) = body.split_at(1);
        out.push_str(lead);
        let rest = rest.trim_end_matches('0');
        if !rest.is_empty() {
            out.push('.');
            out.push_str(rest);
        }
        let _ = write!(out, "e{exponent}");
    } else if exponent < 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exponent - 1) as usize));
        out.push_str(body.trim_end_matches('0'));
    } else {
        let split = exponent as usize + 1;
        let (int, frac) = body.split_at(split);
        out.push_str(int);
        let frac = frac.trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    out
}

/// `x` rounded to `digits` significant digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_significant(x, digits).parse().unwrap_or(x)
}

/// Named columns and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_owned()).collect(), rows: Vec::new() }
    }

    /// Appends a row.
    ///
    /// # Panics
    /// If the row length differs from the column count.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Projects onto the named columns.
    pub fn select(&self, names: &[&str]) -> Option<Table> {
        let idx: Option<Vec<usize>> =
            names.iter().map(|n| self.columns.iter().position(|c| c == n)).collect();
        let idx = idx?;
        let mut out = Table::new(names);
        for row in &self.rows {
            out.push(idx.iter().map(|&i| row[i].clone()).collect());
        }
        Some(out)
    }

    /// Header line plus one line per row, `\n`-terminated.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by column name, in column order.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&Value::Array(rows)).expect("serializable");
        out.push('\n');
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_like_percent_g() {
        assert_eq!(format_significant(4.049_885_529_355_85, 12), "4.04988552936");
        assert_eq!(format_significant(16.0, 12), "16");
        assert_eq!(format_significant(-0.5, 12), "-0.5");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(0.000_123, 12), "0.000123");
        assert_eq!(format_significant(1e15, 12), "1e15");
        assert_eq!(format_significant(9.999_999_999_999_7, 12), "10");
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["kind", "n", "value"]);
        t.push(vec!["holevo".into(), 3usize.into(), 1.25.into()]);
        t.push(vec!["homodyne".into(), 4usize.into(), (-2.0f64).into()]);
        assert_eq!(t.to_csv(), "kind,n,value\nholevo,3,1.25\nhomodyne,4,-2\n");
        let a = t.select(&["value", "kind"]).unwrap();
        assert_eq!(a.to_csv(), "value,kind\n1.25,holevo\n-2,homodyne\n");
        assert!(t.select(&["missing"]).is_none());
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![1.0.into(), true.into()]);
        let json = t.to_json();
        assert!(json.find("\"z\"").unwrap() < json.find("\"a\"").unwrap());
    }

    proptest! {
        #[test]
        fn csv_rendering_is_stable(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let once = format_significant(x, SIGNIFICANT_DIGITS);
            let parsed: f64 = once.parse().unwrap();
            prop_assert_eq!(format_significant(parsed, SIGNIFICANT_DIGITS), once);
            prop_assert_eq!(parsed, round_significant(x, SIGNIFICANT_DIGITS));
            if x.is_normal() {
                prop_assert!(((parsed - x) / x).abs() <= 5.000_001e-12);
            }
        }
    }
}
