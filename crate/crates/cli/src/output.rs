//! Deterministic CSV and JSON emission.
//!
//! Floats are printed in scientific notation with a fixed number of
//! significant digits, so identical inputs give byte-identical files.

use std::io::Write;

use gaussent::FitResult;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(x) => Some(x),
            _ => None,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    /// Parameters identifying the fitted subset of rows.
    pub group: Vec<(String, Cell)>,
    pub kind: &'static str,
    pub fit: FitResult,
    pub conformal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub fits: Vec<FitRecord>,
}

impl ScanResult {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one numeric column, `None` for empty or text cells.
    pub fn values(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| r[i].as_f64()).collect(),
            None => Vec::new(),
        }
    }
}

pub fn format_float(x: f64, precision: u32) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{:.*e}", precision.saturating_sub(1) as usize, x)
    }
}

fn cell_text(cell: &Cell, precision: u32) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x, precision),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn cell_json(cell: &Cell, precision: u32) -> Value {
    match cell {
        Cell::Int(i) => json!(i),
        // round through the printed form so JSON carries the same digits
        Cell::Float(x) if x.is_finite() => json!(format_float(*x, precision).parse::<f64>().expect("valid float")),
        Cell::Float(_) | Cell::Empty => Value::Null,
        Cell::Text(s) => json!(s),
    }
}

fn fit_fields(rec: &FitRecord) -> Vec<(&'static str, Cell)> {
    let f = &rec.fit;
    vec![
        ("kind", Cell::Text(rec.kind.into())),
        ("slope", Cell::Float(f.slope)),
        ("offset", Cell::Float(f.offset)),
        ("rms_residual", Cell::Float(f.rms_residual)),
        ("max_residual", Cell::Float(f.max_residual)),
        ("n_points", f.n_points.into()),
        ("var_slope", Cell::Float(f.covariance[0][0])),
        ("var_offset", Cell::Float(f.covariance[1][1])),
        ("cov_slope_offset", Cell::Float(f.covariance[0][1])),
        ("conformal", Cell::Text(rec.conformal.to_string())),
    ]
}

pub fn write_csv(result: &ScanResult, precision: u32, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "# gaussent {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# command: {}", result.command)?;
    for (k, v) in &result.parameters {
        writeln!(out, "# {k} = {v}")?;
    }
    writeln!(out, "{}", result.columns.join(","))?;
    for row in &result.rows {
        let cells: Vec<String> = row.iter().map(|c| cell_text(c, precision)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    for rec in &result.fits {
        let mut parts: Vec<String> = rec
            .group
            .iter()
            .map(|(k, v)| format!("{k}={}", cell_text(v, precision)))
            .collect();
        parts.extend(
            fit_fields(rec)
                .iter()
                .map(|(k, v)| format!("{k}={}", cell_text(v, precision))),
        );
        writeln!(out, "# fit {}", parts.join(" "))?;
    }
    Ok(())
}

pub fn to_json(result: &ScanResult, precision: u32) -> Value {
    let parameters: Map<String, Value> = result.parameters.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(|c| cell_json(c, precision)).collect()))
        .collect();
    let fits: Vec<Value> = result
        .fits
        .iter()
        .map(|rec| {
            let group: Map<String, Value> = rec
                .group
                .iter()
                .map(|(k, v)| (k.clone(), cell_json(v, precision)))
                .collect();
            let f = &rec.fit;
            let cov: Vec<Value> = f
                .covariance
                .iter()
                .map(|row| Value::Array(row.iter().map(|&x| cell_json(&Cell::Float(x), precision)).collect()))
                .collect();
            json!({
                "group": group,
                "kind": rec.kind,
                "slope": cell_json(&Cell::Float(f.slope), precision),
                "offset": cell_json(&Cell::Float(f.offset), precision),
                "rms_residual": cell_json(&Cell::Float(f.rms_residual), precision),
                "max_residual": cell_json(&Cell::Float(f.max_residual), precision),
                "n_points": f.n_points,
                "covariance": cov,
                "conformal": rec.conformal,
            })
        })
        .collect();
    json!({
        "provenance": {
            "tool": "gaussent",
            "version": env!("CARGO_PKG_VERSION"),
            "command": result.command,
            "parameters": parameters,
        },
        "columns": result.columns,
        "rows": rows,
        "fits": fits,
    })
}

pub fn write_json(result: &ScanResult, precision: u32, out: &mut dyn Write) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&to_json(result, precision)).expect("json values serialize");
    writeln!(out, "{text}")
}
