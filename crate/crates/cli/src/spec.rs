//! Set files.
//!
//! ```json
//! {"n": 2, "sets": {"K0": {"kind": "polyradii", "data": [[0.5, 0.25]]}}}
//! ```
//!
//! `log_generators` data are points of `Log K` (negative coordinates);
//! `polyradii` data are polyradii in `(0, 1)^n`, converted by `ln`.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use tgc_core::LogBody;

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    LogGenerators,
    Polyradii,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetSpec {
    pub name: String,
    pub kind: SetKind,
    pub data: Vec<Vec<f64>>,
}

impl SetSpec {
    /// Data in logarithmic coordinates.
    pub fn log_generators(&self) -> Vec<Vec<f64>> {
        match self.kind {
            SetKind::LogGenerators => self.data.clone(),
            SetKind::Polyradii => self
                .data
                .iter()
                .map(|r| r.iter().map(|v| v.ln()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParsedSet {
    pub spec: SetSpec,
    pub body: LogBody,
}

#[derive(Clone, Debug)]
pub struct SpecFile {
    pub dim: usize,
    /// Sorted by name.
    pub sets: Vec<ParsedSet>,
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        parse_spec(&bytes)
    }

    pub fn get(&self, name: &str) -> Result<&ParsedSet> {
        self.sets
            .iter()
            .find(|s| s.spec.name == name)
            .ok_or_else(|| CliError::UnknownSet {
                name: name.to_string(),
                available: self
                    .sets
                    .iter()
                    .map(|s| s.spec.name.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            })
    }
}

fn violation(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::SchemaViolation {
        path: path.into(),
        message: message.into(),
    }
}

fn reject_unknown(map: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) => Err(violation(format!("{path}.{key}"), "unknown field")),
        None => Ok(()),
    }
}

pub fn parse_spec(bytes: &[u8]) -> Result<SpecFile> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| CliError::MalformedJson {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = root
        .as_object()
        .ok_or_else(|| violation("$", "expected an object"))?;
    reject_unknown(root, "$", &["n", "sets"])?;

    let dim = match root.get("n") {
        None => return Err(violation("$.n", "missing field")),
        Some(v) => v
            .as_u64()
            .filter(|&n| n >= 1)
            .ok_or_else(|| violation("$.n", "expected a positive integer"))?
            as usize,
    };

    let sets = match root.get("sets") {
        None => return Err(violation("$.sets", "missing field")),
        Some(v) => v
            .as_object()
            .ok_or_else(|| violation("$.sets", "expected an object"))?,
    };
    if sets.is_empty() {
        return Err(violation("$.sets", "at least one set is required"));
    }

    let sets = sets
        .iter()
        .map(|(name, value)| parse_set(name, value, dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpecFile { dim, sets })
}

fn parse_set(name: &str, value: &Value, dim: usize) -> Result<ParsedSet> {
    let path = format!("$.sets.{name}");
    let obj = value
        .as_object()
        .ok_or_else(|| violation(&path, "expected an object"))?;
    reject_unknown(obj, &path, &["kind", "data"])?;

    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("log_generators") => SetKind::LogGenerators,
        Some("polyradii") => SetKind::Polyradii,
        Some(other) => {
            return Err(violation(
                format!("{path}.kind"),
                format!("unknown kind '{other}', expected 'log_generators' or 'polyradii'"),
            ))
        }
        None => return Err(violation(format!("{path}.kind"), "expected a string")),
    };

    let rows = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| violation(format!("{path}.data"), "expected an array of points"))?;
    if rows.is_empty() {
        return Err(violation(
            format!("{path}.data"),
            "at least one point is required",
        ));
    }
    let mut data = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row_path = format!("{path}.data[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| violation(&row_path, "expected an array of numbers"))?;
        if row.len() != dim {
            return Err(violation(
                &row_path,
                format!("expected {dim} coordinates, found {}", row.len()),
            ));
        }
        let mut point = Vec::with_capacity(dim);
        for (l, v) in row.iter().enumerate() {
            let x = v
                .as_f64()
                .ok_or_else(|| violation(format!("{row_path}[{l}]"), "expected a number"))?;
            if kind == SetKind::Polyradii && !(x > 0.0 && x < 1.0) {
                return Err(violation(
                    format!("{row_path}[{l}]"),
                    format!("polyradius {x} outside the open interval (0, 1)"),
                ));
            }
            point.push(x);
        }
        data.push(point);
    }

    let spec = SetSpec {
        name: name.to_string(),
        kind,
        data,
    };
    let body = LogBody::new(spec.log_generators(), dim).map_err(|source| CliError::InvalidSet {
        set: name.to_string(),
        source,
    })?;
    Ok(ParsedSet { spec, body })
}
