//! CSV tables and plain-text summaries.

use std::io::Write;
use std::path::Path;

use ndspressure::pressure::PressureEstimate;
use serde::Serialize;

use crate::harness::CheckReport;

/// One CSV line. Estimates leave `lower`, `upper` and `pass` empty; check
/// reports fill the trailing columns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    /// Instance label.
    pub instance: String,
    /// Quantity name.
    pub quantity: String,
    /// Radius.
    pub eps: Option<f64>,
    /// Depth used at that radius.
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Largest depth requested.
    pub n_max: Option<usize>,
    /// Critical exponent at that radius.
    pub s_star: Option<f64>,
    /// Estimate or compared value.
    pub value: f64,
    /// Lower acceptance bound.
    pub lower: Option<f64>,
    /// Upper acceptance bound.
    pub upper: Option<f64>,
    /// Check outcome.
    pub pass: Option<bool>,
    /// Wall time.
    pub runtime_ms: u128,
    /// Suite of a check.
    pub suite: String,
    /// Check name.
    pub check: String,
    /// Whether a failure is expected and documented.
    pub informative: Option<bool>,
    /// Free-form details.
    pub diagnostics: String,
}

impl From<&CheckReport> for Row {
    fn from(r: &CheckReport) -> Self {
        Self {
            instance: r.instance.clone(),
            quantity: r.quantity.clone(),
            eps: r.eps,
            n: r.n,
            n_max: r.n_max,
            s_star: r.s_star,
            value: r.value,
            lower: Some(r.lower),
            upper: Some(r.upper),
            pass: Some(r.pass),
            runtime_ms: r.runtime_ms,
            suite: r.suite.clone(),
            check: r.check.clone(),
            informative: Some(r.informative),
            diagnostics: r.diagnostics.clone(),
        }
    }
}

/// One row per radius of an estimate; `value` repeats the final estimate.
pub fn estimate_rows(instance: &str, quantity: &str, e: &PressureEstimate, runtime_ms: u128) -> Vec<Row> {
    let note = format!("scheme {:?}, plateau {}, truncated {}, slack {:.3e}", e.scheme, e.plateau, e.truncated, e.grid_slack);
    e.per_eps
        .iter()
        .map(|p| Row {
            instance: instance.into(),
            quantity: quantity.into(),
            eps: Some(p.eps),
            n: Some(p.resolved_depth),
            n_max: Some(e.n_max),
            s_star: Some(p.s_star),
            value: e.value,
            lower: None,
            upper: None,
            pass: None,
            runtime_ms,
            suite: String::new(),
            check: String::new(),
            informative: None,
            diagnostics: note.clone(),
        })
        .collect()
}

/// Write rows as CSV.
pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "instance", "quantity", "eps", "N", "n_max", "s_star", "value", "lower", "upper", "pass", "runtime_ms", "suite", "check", "informative",
            "diagnostics",
        ])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Write rows to a CSV file, creating parent directories.
pub fn write_csv_file(path: &Path, rows: &[Row]) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    write_csv(std::fs::File::create(path)?, rows)?;
    Ok(())
}

/// Human-readable summary of check reports.
pub fn summary(reports: &[CheckReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    let failed = reports.iter().filter(|r| r.failed()).count();
    let info = reports.iter().filter(|r| r.informative).count();
    s.push_str(&format!("{} checks, {} failed, {} informative\n", reports.len(), failed, info));
    s
}
