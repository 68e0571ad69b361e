//! Deterministic CSV and JSON output.
//!
//! CSV floats are written with 17 significant digits in scientific notation,
//! integers as integers, lines end in `\n`. JSON uses the struct field order
//! and the shortest representation that round-trips each float; NaN becomes
//! `null`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::bconst::{BoundRow, Method};
use crate::error::{Error, Result};
use crate::experiments::{SqueezeRow, SweepRow};
use crate::fem::StudyRow;
use crate::geometry::TriangleMetrics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Int(i) => write!(out, "{i}").expect("write to string"),
            Cell::Float(x) => write!(out, "{}", format_float(*x)).expect("write to string"),
            Cell::Text(s) => out.push_str(s),
        }
    }
}

/// 17 significant digits, e.g. `7.0710678118654757e-1`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A row type with a fixed CSV layout.
pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn cells(&self) -> Vec<Cell>;
}

fn floats(v: &[f64]) -> Vec<Cell> {
    v.iter().map(|x| Cell::Float(*x)).collect()
}

impl CsvRecord for TriangleMetrics {
    fn header() -> Vec<&'static str> {
        TriangleMetrics::CSV_HEADER.to_vec()
    }
    fn cells(&self) -> Vec<Cell> {
        floats(&self.csv_values())
    }
}

impl CsvRecord for SweepRow {
    fn header() -> Vec<&'static str> {
        SweepRow::CSV_HEADER.to_vec()
    }
    fn cells(&self) -> Vec<Cell> {
        floats(&self.csv_values())
    }
}

impl CsvRecord for BoundRow {
    fn header() -> Vec<&'static str> {
        BoundRow::CSV_HEADER.to_vec()
    }
    fn cells(&self) -> Vec<Cell> {
        let mut c = vec![Cell::Int(self.m as i64), Cell::Int(self.k as i64)];
        c.extend(floats(&[
            self.p,
            self.h_k,
            self.r,
            self.rho,
            self.theta_max,
            self.b_lower,
            self.bound_ratio,
        ]));
        c
    }
}

impl CsvRecord for StudyRow {
    fn header() -> Vec<&'static str> {
        StudyRow::CSV_HEADER.to_vec()
    }
    fn cells(&self) -> Vec<Cell> {
        let mut c = vec![Cell::Int(self.n as i64)];
        c.extend(floats(&[
            self.a,
            self.b,
            self.max_r,
            self.max_theta,
            self.max_chunk,
            self.h1err,
            self.l2err,
            self.interp_err,
        ]));
        c
    }
}

impl CsvRecord for SqueezeRow {
    fn header() -> Vec<&'static str> {
        vec!["alpha", "B_lower", "method"]
    }
    fn cells(&self) -> Vec<Cell> {
        let method = match self.method {
            Method::EigenP2 => "eigen-p2",
            Method::Sampled => "sampled",
        };
        vec![
            Cell::Float(self.alpha),
            Cell::Float(self.value),
            Cell::Text(method.to_string()),
        ]
    }
}

pub fn render_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for r in rows {
        for (i, c) in r.cells().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            c.render(&mut out);
        }
        out.push('\n');
    }
    out
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn render_report<R: CsvRecord + Serialize>(rows: &[R], format: Format) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to report".into()));
    }
    match format {
        Format::Csv => Ok(render_csv(rows)),
        Format::Json => render_json(rows),
    }
}

pub fn write_report<R: CsvRecord + Serialize>(rows: &[R], path: &Path, format: Format) -> Result<()> {
    let text = render_report(rows, format)?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{metrics, Triangle};

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
        assert_eq!(format_float(2f64.sqrt() / 2.0), "7.0710678118654757e-1");
        let back: f64 = format_float(0.1 + 0.2).parse().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }

    #[test]
    fn metrics_csv_has_header_and_row() {
        let m = metrics(&Triangle::unit_right());
        let s = render_report(&[m], Format::Csv).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "h1,h2,hK,S,R,rho,theta_min,theta_max,chunkiness,semiregularity");
        assert!(s.ends_with('\n') && !s.contains('\r'));
    }

    #[test]
    fn json_key_order_is_stable() {
        let m = metrics(&Triangle::unit_right());
        let s = render_report(&[m], Format::Json).unwrap();
        let h1 = s.find("\"h1\"").unwrap();
        let hk = s.find("\"h_k\"").unwrap();
        let sr = s.find("\"semiregularity\"").unwrap();
        assert!(h1 < hk && hk < sr);
        assert_eq!(s, render_report(&[m], Format::Json).unwrap());
    }

    #[test]
    fn empty_rows_rejected() {
        let rows: Vec<TriangleMetrics> = Vec::new();
        assert!(render_report(&rows, Format::Csv).is_err());
        assert!("xml".parse::<Format>().is_err());
    }
}
