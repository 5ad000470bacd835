//! CSV and JSON output for experiment records. Reals are written with 12
//! significant digits, so identical records give identical bytes.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::clt::CltReport;
use super::concentration::ConcentrationReport;
use super::counts::{ExperimentRecord, TrendReport};
use crate::error::{Error, Result};
use crate::format::{fmt_real, round_json, SIGNIFICANT_DIGITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        })
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::invalid(format!(
                "unknown format {other:?}; expected csv or json"
            ))),
        }
    }
}

/// Tabular and aggregate views of a record.
pub trait Exportable: Serialize {
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

impl Exportable for ExperimentRecord {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "trial",
            "n",
            "ordered_count",
            "unordered_count",
            "ordered_ratio",
            "unordered_ratio",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.per_trial
            .iter()
            .map(|r| {
                vec![
                    r.trial.to_string(),
                    r.n.to_string(),
                    r.ordered_count.to_string(),
                    r.unordered_count.to_string(),
                    fmt_real(r.ordered_ratio),
                    fmt_real(r.unordered_ratio),
                ]
            })
            .collect()
    }
}

impl Exportable for CltReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["trial", "k", "value", "standardized"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                vec![
                    i.to_string(),
                    self.k.to_string(),
                    fmt_real(*v),
                    self.standardized
                        .get(i)
                        .map_or_else(|| "NA".into(), |z| fmt_real(*z)),
                ]
            })
            .collect()
    }
}

/// One row per size, then a `tail` row whose `expected` is the mean tail
/// count, `bound` the limit and `violations` the trials above it.
impl Exportable for ConcentrationReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &["k", "expected", "bound", "violations", "trials", "rate"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.k.to_string(),
                    fmt_real(r.expected),
                    fmt_real(r.bound),
                    r.violations.to_string(),
                    r.trials.to_string(),
                    fmt_real(r.rate),
                ]
            })
            .collect();
        let t = &self.tail;
        let violations = t.trials - t.within;
        rows.push(vec![
            "tail".into(),
            fmt_real(t.mean),
            fmt_real(t.limit),
            violations.to_string(),
            t.trials.to_string(),
            fmt_real(violations as f64 / t.trials as f64),
        ]);
        rows
    }
}

impl Exportable for TrendReport {
    fn csv_header(&self) -> &'static [&'static str] {
        &[
            "n",
            "ordered_mean",
            "unordered_mean",
            "ordered_distance",
            "unordered_distance",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.points
            .iter()
            .map(|p| {
                vec![
                    p.n.to_string(),
                    fmt_real(p.ordered_mean),
                    fmt_real(p.unordered_mean),
                    fmt_real(p.ordered_distance),
                    fmt_real(p.unordered_distance),
                ]
            })
            .collect()
    }
}

/// Writes `item` to `out`. Errors are reported against `label`.
pub fn write_export<T, W>(item: &T, out: W, format: ExportFormat, label: &Path) -> Result<()>
where
    T: Exportable,
    W: Write,
{
    match format {
        ExportFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: label.to_path_buf(),
                source,
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(item.csv_header()).map_err(csv_err)?;
            for row in item.csv_rows() {
                w.write_record(&row).map_err(csv_err)?;
            }
            w.flush().map_err(|source| Error::Io {
                path: label.to_path_buf(),
                source,
            })
        }
        ExportFormat::Json => {
            let io_err = |source| Error::Io {
                path: label.to_path_buf(),
                source,
            };
            let mut value = serde_json::to_value(item).map_err(|e| io_err(e.into()))?;
            round_json(&mut value, SIGNIFICANT_DIGITS);
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &value).map_err(|e| io_err(e.into()))?;
            out.write_all(b"\n").map_err(io_err)?;
            out.flush().map_err(io_err)
        }
    }
}

pub fn export<T: Exportable>(item: &T, path: &Path, format: ExportFormat) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_export(item, BufWriter::new(file), format, path)
}
