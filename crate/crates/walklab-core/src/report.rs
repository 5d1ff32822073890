//! Serialisation of check runs to JSON and CSV reports.
//!
//! Both sides of every identity are recorded as decimal strings exactly as
//! the engine printed them — never as binary floats — so a report can be
//! parsed back and re-verified digit-for-digit by any external tool.  The
//! JSON document is
//!
//! ```text
//!   { "precision": 30, "seed": 1, "checks": [
//!       { "id": "...", "status": "proven", "lhs": "...", "rhs": "...",
//!         "digits_agreed": 25, "elapsed_s": 0.81, "pass": true }, ... ] }
//! ```
//!
//! and the CSV variant carries the same seven per-check fields under the
//! header `id,status,lhs,rhs,digits_agreed,elapsed_s,pass`, with RFC-4180
//! quoting for fields that need it (error messages may contain commas).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::registry::CheckResult;
use crate::Result;

/// Output format for [`write_report`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// One check row as it appears in a report.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ReportEntry {
    pub id: String,
    pub status: String,
    pub lhs: String,
    pub rhs: String,
    pub digits_agreed: i64,
    pub elapsed_s: f64,
    pub pass: bool,
}

/// The full JSON document.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct ReportDocument {
    pub precision: u32,
    pub seed: u64,
    pub checks: Vec<ReportEntry>,
}

impl ReportDocument {
    pub fn new(precision: u32, seed: u64, results: &[CheckResult]) -> Self {
        ReportDocument {
            precision,
            seed,
            checks: results
                .iter()
                .map(|r| ReportEntry {
                    id: r.id.clone(),
                    status: r.status.as_str().to_string(),
                    lhs: r.lhs_value.clone(),
                    rhs: r.rhs_value.clone(),
                    digits_agreed: r.digits_agreed,
                    elapsed_s: r.elapsed_seconds,
                    pass: r.pass,
                })
                .collect(),
        }
    }
}

/// Render the JSON report.
pub fn render_json(precision: u32, seed: u64, results: &[CheckResult]) -> String {
    let doc = ReportDocument::new(precision, seed, results);
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialisation is infallible");
    text.push('\n');
    text
}

/// Parse a JSON report back into its document form.
pub fn parse_json(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text)
        .map_err(|e| crate::Error::Unknown(format!("malformed report JSON: {e}")))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Render the CSV report.
pub fn render_csv(results: &[CheckResult]) -> String {
    let mut out = String::from("id,status,lhs,rhs,digits_agreed,elapsed_s,pass\n");
    for r in results {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            csv_field(&r.id),
            r.status.as_str(),
            csv_field(&r.lhs_value),
            csv_field(&r.rhs_value),
            r.digits_agreed,
            r.elapsed_seconds,
            r.pass
        ));
    }
    out
}

/// Write a report file in the requested format.  `precision` and `seed`
/// describe the run and appear only in the JSON header.
pub fn write_report(
    results: &[CheckResult],
    path: &Path,
    format: ReportFormat,
    precision: u32,
    seed: u64,
) -> Result<()> {
    let text = match format {
        ReportFormat::Json => render_json(precision, seed, results),
        ReportFormat::Csv => render_csv(results),
    };
    fs::write(path, text)?;
    Ok(())
}
