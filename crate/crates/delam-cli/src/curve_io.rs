//! CSV curves. Floats carry 17 significant digits, so a curve survives a
//! write/read cycle bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use delam::analytic::{AnalyticCurve, Branch};
use delam::solver::LoadDisplacementCurve;

use crate::error::{CliError, Result};

pub const CURVE_HEADER: [&str; 5] = ["increment", "displacement_mm", "load_N", "iterations", "dissipation_Nmm"];
pub const ANALYTIC_HEADER: [&str; 4] = ["displacement_mm", "load_N", "crack_length_mm", "branch"];

/// One row of a simulated curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub increment: usize,
    pub displacement: f64,
    pub load: f64,
    pub iterations: usize,
    pub dissipation: f64,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn rows(curve: &LoadDisplacementCurve) -> Vec<CurveRow> {
    curve
        .points
        .iter()
        .map(|p| CurveRow {
            increment: p.increment,
            displacement: p.displacement,
            load: p.load,
            iterations: p.iterations,
            dissipation: p.dissipation,
        })
        .collect()
}

fn csv_err(e: csv::Error) -> String {
    e.to_string()
}

pub fn write_rows<W: Write>(out: W, rows: &[CurveRow]) -> std::result::Result<(), String> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.increment.to_string(),
            fmt_f64(r.displacement),
            fmt_f64(r.load),
            r.iterations.to_string(),
            fmt_f64(r.dissipation),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| e.to_string())
}

pub fn read_rows<R: Read>(input: R) -> std::result::Result<Vec<CurveRow>, String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CURVE_HEADER) {
        return Err(format!("expected header {}", CURVE_HEADER.join(",")));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |i: usize| format!("row {}: bad {} '{}'", line + 1, CURVE_HEADER[i], field(i));
        let float = |i: usize| field(i).parse::<f64>().map_err(|_| bad(i));
        let int = |i: usize| field(i).parse::<usize>().map_err(|_| bad(i));
        out.push(CurveRow {
            increment: int(0)?,
            displacement: float(1)?,
            load: float(2)?,
            iterations: int(3)?,
            dissipation: float(4)?,
        });
    }
    Ok(out)
}

pub fn write_curve(path: &Path, rows: &[CurveRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    write_rows(std::io::BufWriter::new(file), rows).map_err(|e| CliError::Csv(path.to_path_buf(), e))
}

pub fn read_curve(path: &Path) -> Result<Vec<CurveRow>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    read_rows(file).map_err(|e| CliError::Csv(path.to_path_buf(), e))
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Elastic => "elastic",
        Branch::Propagation => "propagation",
        Branch::PropagationPastLoad => "propagation-past-load",
    }
}

pub fn write_analytic(path: &Path, curve: &AnalyticCurve) -> Result<()> {
    let wrap = |e: csv::Error| CliError::Csv(path.to_path_buf(), e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(ANALYTIC_HEADER).map_err(wrap)?;
    for p in &curve.points {
        w.write_record([fmt_f64(p.delta), fmt_f64(p.load), fmt_f64(p.crack_length), branch_name(p.branch).to_string()])
            .map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// (displacement, load) pairs from any CSV with `displacement_mm` and
/// `load_N` columns.
pub fn read_xy(path: &Path) -> Result<Vec<(f64, f64)>> {
    let err = |m: String| CliError::Csv(path.to_path_buf(), m);
    let mut r = csv::Reader::from_path(path).map_err(|e| err(e.to_string()))?;
    let header = r.headers().map_err(|e| err(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| err(format!("missing column {name}")));
    let (cx, cy) = (col("displacement_mm")?, col("load_N")?);
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| err(e.to_string()))?;
        let get = |c: usize| {
            rec.get(c)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| err(format!("row {}: bad number in column {}", line + 1, header.get(c).unwrap_or(""))))
        };
        out.push((get(cx)?, get(cy)?));
    }
    Ok(out)
}
