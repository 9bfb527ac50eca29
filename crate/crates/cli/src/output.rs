//! CSV and JSON rendering.
//!
//! Both formats start with the run configuration (including the seed) so a
//! result file is enough to reproduce it. Floats use Rust's shortest
//! round-trip representation, which keeps output byte-stable and lets JSON
//! re-parse to identical bits.

use serde_json::{json, Value};

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    /// Extra `# key: value` lines in the CSV header.
    pub notes: Vec<(&'static str, Value)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Full result for the JSON format.
    pub result: Value,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = format!("# tgc {} {}\n", env!("CARGO_PKG_VERSION"), self.command);
        out.push_str(&format!("# config: {}\n", self.config));
        for (key, value) in &self.notes {
            out.push_str(&format!("# {key}: {value}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let doc = json!({
            "tgc": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "result": self.result,
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        out.push('\n');
        out
    }
}
