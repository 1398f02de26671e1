//! Plain-text and JSON rendering of result tables.

use pir_array_codes::rational::{fraction, to_decimal, Rational};
use serde_json::{json, Map, Value};

/// Significant digits shown for decimal renderings.
const DISPLAY_DIGITS: usize = 20;

pub fn exact(v: &Rational) -> String {
    fraction(v)
}

pub fn decimal(v: &Rational) -> String {
    to_decimal(v, DISPLAY_DIGITS)
}

pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.headers.len(), "row width");
        self.rows.push(row);
    }

    /// Left-aligned columns separated by two spaces, header first.
    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            format!("{}\n", padded.join("  ").trim_end())
        };
        let mut out = line(&self.headers);
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .headers
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| json!(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({ "columns": self.headers, "rows": rows })
    }
}
