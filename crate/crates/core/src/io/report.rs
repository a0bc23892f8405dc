//! CSV tables (RFC 4180 quoting via the `csv` crate).

use std::path::Path;

use crate::compare::CompareRow;
use crate::convexity::AdmissibilityReport;
use crate::energy::EnergyBreakdown;
use crate::error::Result;
use crate::loads::Resultants;
use crate::minimizer::TraceRow;

/// Write a header and rows of already formatted fields.
pub fn write_table<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Rust's shortest round-trip float formatting; `inf` for infinities.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

pub fn breakdown_rows(b: &EnergyBreakdown) -> Vec<Vec<String>> {
    [
        ("shell", b.shell_term),
        ("curvature_log", b.curv_log_term),
        ("curvature_det2", b.curv_det2_term),
        ("constant", b.constant_term),
        ("internal", b.internal()),
        ("load", b.load_term),
        ("total", b.total),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), fmt_f64(*v)])
    .collect()
}

pub fn write_breakdown(path: &Path, b: &EnergyBreakdown) -> Result<()> {
    write_table(path, &["term", "value"], &breakdown_rows(b))
}

pub fn write_admissibility(path: &Path, r: &AdmissibilityReport) -> Result<()> {
    let mut rows: Vec<Vec<String>> = r.rows().into_iter().map(|(k, v)| vec![k, fmt_f64(v)]).collect();
    for (i, p) in r.pass.iter().enumerate() {
        rows.push(vec![format!("model{}.pass", i + 1), p.to_string()]);
    }
    write_table(path, &["quantity", "value"], &rows)
}

pub fn write_trace(path: &Path, trace: &[TraceRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = trace
        .iter()
        .map(|t| {
            vec![
                t.iter.to_string(),
                fmt_f64(t.energy),
                fmt_f64(t.grad_norm),
                fmt_f64(t.step),
                fmt_f64(t.min_area_ratio),
                fmt_f64(t.min_face),
            ]
        })
        .collect();
    write_table(path, &["iter", "energy", "grad_norm", "step", "min_area_ratio", "min_face"], &rows)
}

pub fn write_compare(path: &Path, rows: &[CompareRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.h),
                r.deformation.label().to_string(),
                r.model.to_string(),
                fmt_f64(r.reduced),
                fmt_f64(r.volumetric),
                fmt_f64(r.error),
                fmt_f64(r.scaled_error),
            ]
        })
        .collect();
    write_table(path, &["h", "deformation", "model", "reduced", "volumetric", "error", "scaled_error"], &rows)
}

pub fn write_resultants(path: &Path, r: &Resultants) -> Result<()> {
    let rows: Vec<Vec<String>> = [("force", r.force), ("moment", r.moment), ("edge_force", r.edge_force), ("edge_moment", r.edge_moment)]
        .iter()
        .map(|(k, v)| vec![k.to_string(), fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])])
        .collect();
    write_table(path, &["resultant", "x", "y", "z"], &rows)
}
