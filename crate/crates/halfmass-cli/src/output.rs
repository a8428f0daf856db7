//! Deterministic CSV and JSONL row output.
//!
//! Rows print in schedule order with Rust's shortest-roundtrip float
//! formatting, so identical configurations produce byte-identical files no
//! matter how many worker threads computed them.

use halfmass::mass::MassReport;
use halfmass::Error;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    pub fn from_name(name: &str) -> Result<Self, Error> {
        match name {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(Error::config(
                "format",
                format!("expected `csv` or `jsonl`, got `{other}`"),
            )),
        }
    }
}

/// One output row; field names are shared verbatim between CSV and JSONL.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub metric: String,
    pub params: String,
    pub functional: String,
    pub r: f64,
    pub value: f64,
    pub area: f64,
    pub volume: Option<f64>,
    pub theta: f64,
    pub quad_order: usize,
    pub warnings: Vec<String>,
}

impl Row {
    pub fn from_report(metric: &str, params: &str, report: &MassReport) -> Self {
        Row {
            metric: metric.to_string(),
            params: params.to_string(),
            functional: report.functional.name().to_string(),
            r: report.r,
            value: report.value,
            area: report.area,
            volume: report.volume,
            theta: report.theta,
            quad_order: report.order,
            warnings: report.warnings.clone(),
        }
    }
}

pub const CSV_HEADER: &str =
    "metric,params,functional,r,value,area,volume,theta,quad_order,warnings";

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write rows with the resolved configuration echoed as `#` header comments.
pub fn write_rows(
    out: &mut dyn Write,
    format: Format,
    resolved: &[(String, String)],
    rows: &[Row],
) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            for (key, value) in resolved {
                writeln!(out, "# {key} = {value}")?;
            }
            writeln!(out, "{CSV_HEADER}")?;
            for row in rows {
                let volume = row.volume.map(|v| v.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    csv_quote(&row.metric),
                    csv_quote(&row.params),
                    row.functional,
                    row.r,
                    row.value,
                    row.area,
                    volume,
                    row.theta,
                    row.quad_order,
                    csv_quote(&row.warnings.join("; "))
                )?;
            }
        }
        Format::Jsonl => {
            for row in rows {
                serde_json::to_writer(&mut *out, row)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}
