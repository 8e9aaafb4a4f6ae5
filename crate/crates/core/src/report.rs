//! Tabular output in three encodings: aligned text, CSV and JSON.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::arith::{format_rat, BigRat, Valuation};

/// Largest magnitude emitted as a bare JSON number.
pub const JSON_SAFE_INT: i128 = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Rat(BigRat),
    Val(Valuation),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Rat(r) => format_rat(r),
            Cell::Val(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) if v.abs() <= JSON_SAFE_INT => Value::from(*v as i64),
            Cell::Val(Valuation::Finite(v)) if (*v as i128).abs() <= JSON_SAFE_INT => {
                Value::from(*v)
            }
            Cell::Bool(b) => Value::Bool(*b),
            other => Value::String(other.text()),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<BigRat> for Cell {
    fn from(v: BigRat) -> Self {
        Cell::Rat(v)
    }
}

impl From<Valuation> for Cell {
    fn from(v: Valuation) -> Self {
        Cell::Val(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[&'static str] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.to_text(),
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("write to Vec");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))
                .expect("write to Vec");
        }
        String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8")
    }

    /// A JSON array with one compact object per line, keys in column order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            let obj: Map<String, Value> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, c)| (k.to_string(), c.json()))
                .collect();
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            out.push_str(&Value::Object(obj).to_string());
        }
        out.push_str("\n]\n");
        out
    }

    pub fn to_text(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::text).collect())
            .collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, h)| {
                cells
                    .iter()
                    .map(|r| r[i].len())
                    .chain([h.len()])
                    .max()
                    .unwrap()
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, fields: &mut dyn Iterator<Item = &str>| {
            let parts: Vec<String> = fields
                .zip(&widths)
                .map(|(f, w)| format!("{f:>w$}"))
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, &mut self.columns.iter().copied());
        for r in &cells {
            line(&mut out, &mut r.iter().map(String::as_str));
        }
        out
    }
}
