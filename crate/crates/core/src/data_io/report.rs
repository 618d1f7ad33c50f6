//! Deterministic report serialization: JSON for machines, CSV for plots,
//! aligned text for eyes. Reals are rendered at six significant digits in
//! every format, so serialize-then-parse is the identity at that precision.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::analysis::{AnnotationBinRr, GapRrReport};
use crate::error::Result;
use crate::prequential::{CurvePoint, ExperimentReport, MetricsReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" => Ok(ReportFormat::Text),
            other => Err(crate::Error::invalid(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

/// Rounds to `digits` significant digits (reports use six).
pub fn round_sig(x: f64, digits: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor();
    if magnitude.abs() > 300.0 {
        return x;
    }
    let factor = 10f64.powi(digits as i32 - 1 - magnitude as i32);
    (x * factor).round() / factor
}

fn fmt_f64(x: f64) -> String {
    format!("{}", round_sig(x, 6))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// A report that can be written in all three formats. JSON comes from the
/// `Serialize` impl (reals rounded), CSV and text from the tabular shape.
pub trait Report: Serialize {
    fn headers(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn write_report(
    report: &impl Report,
    format: ReportFormat,
    sink: &mut dyn Write,
) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut value = serde_json::to_value(report)?;
            round_json_reals(&mut value);
            serde_json::to_writer_pretty(&mut *sink, &value)?;
            sink.write_all(b"\n")?;
        }
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(sink);
            writer.write_record(report.headers())?;
            for row in report.rows() {
                writer.write_record(&row)?;
            }
            writer.flush()?;
        }
        ReportFormat::Text => {
            let headers = report.headers();
            let rows = report.rows();
            let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
            for row in &rows {
                for (i, cell) in row.iter().enumerate() {
                    widths[i] = widths[i].max(cell.len());
                }
            }
            let mut line = String::new();
            for (i, header) in headers.iter().enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                line.push_str(&format!("{header:<width$}", width = widths[i]));
            }
            sink.write_all(line.trim_end().as_bytes())?;
            sink.write_all(b"\n")?;
            for row in &rows {
                let mut line = String::new();
                for (i, cell) in row.iter().enumerate() {
                    if i > 0 {
                        line.push_str("  ");
                    }
                    line.push_str(&format!("{cell:<width$}", width = widths[i]));
                }
                sink.write_all(line.trim_end().as_bytes())?;
                sink.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn round_json_reals(value: &mut Value) {
    match value {
        Value::Number(number) => {
            if !number.is_i64() && !number.is_u64() {
                if let Some(f) = number.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f, 6)) {
                        *number = rounded;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json_reals),
        Value::Object(map) => map.values_mut().for_each(round_json_reals),
        _ => {}
    }
}

impl Report for MetricsReport {
    fn headers(&self) -> Vec<&'static str> {
        vec!["acc", "wl_acc", "draw_acc", "n", "n_wl", "n_draw"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            fmt_f64(self.acc),
            fmt_opt(self.wl_acc),
            fmt_opt(self.draw_acc),
            self.n.to_string(),
            self.n_wl.to_string(),
            self.n_draw.to_string(),
        ]]
    }
}

impl Report for ExperimentReport {
    fn headers(&self) -> Vec<&'static str> {
        vec![
            "system",
            "treatment",
            "epsilon",
            "acc",
            "wl_acc",
            "draw_acc",
            "rel_acc_pct",
            "rel_wl_pct",
            "delta_pct",
            "mcnemar_b",
            "mcnemar_c",
            "p_value",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|row| {
                vec![
                    row.system.clone(),
                    row.treatment.clone(),
                    fmt_f64(row.epsilon),
                    fmt_f64(row.acc),
                    fmt_opt(row.wl_acc),
                    fmt_opt(row.draw_acc),
                    fmt_f64(row.rel_acc_pct),
                    fmt_opt(row.rel_wl_pct),
                    fmt_f64(row.delta_pct),
                    row.mcnemar_b.map(|v| v.to_string()).unwrap_or_default(),
                    row.mcnemar_c.map(|v| v.to_string()).unwrap_or_default(),
                    fmt_opt(row.p_value),
                ]
            })
            .collect()
    }
}

impl Report for Vec<CurvePoint> {
    fn headers(&self) -> Vec<&'static str> {
        vec!["epsilon", "draw_acc", "wl_acc"]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|point| {
                vec![
                    fmt_f64(point.epsilon),
                    fmt_opt(point.draw_acc),
                    fmt_opt(point.wl_acc),
                ]
            })
            .collect()
    }
}

impl Report for Vec<AnnotationBinRr> {
    fn headers(&self) -> Vec<&'static str> {
        vec![
            "bin",
            "rr",
            "ci_low",
            "ci_high",
            "exposed_draws",
            "exposed_total",
            "unexposed_draws",
            "unexposed_total",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|bin| {
                vec![
                    bin.bin.to_string(),
                    fmt_opt(bin.result.rr),
                    fmt_opt(bin.result.ci_low),
                    fmt_opt(bin.result.ci_high),
                    bin.result.exposed.draws.to_string(),
                    bin.result.exposed.total.to_string(),
                    bin.result.unexposed.draws.to_string(),
                    bin.result.unexposed.total.to_string(),
                ]
            })
            .collect()
    }
}

impl Report for GapRrReport {
    fn headers(&self) -> Vec<&'static str> {
        vec![
            "percentile_low",
            "percentile_high",
            "gap_low",
            "gap_high",
            "merged",
            "rr",
            "ci_low",
            "ci_high",
            "exposed_draws",
            "exposed_total",
            "unexposed_draws",
            "unexposed_total",
        ]
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.bins
            .iter()
            .map(|bin| {
                vec![
                    fmt_f64(bin.percentile_low),
                    fmt_f64(bin.percentile_high),
                    fmt_f64(bin.gap_low),
                    fmt_f64(bin.gap_high),
                    bin.merged.to_string(),
                    fmt_opt(bin.result.rr),
                    fmt_opt(bin.result.ci_low),
                    fmt_opt(bin.result.ci_high),
                    bin.result.exposed.draws.to_string(),
                    bin.result.exposed.total.to_string(),
                    bin.result.unexposed.draws.to_string(),
                    bin.result.unexposed.total.to_string(),
                ]
            })
            .collect()
    }
}
