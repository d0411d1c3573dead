use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Parameters shared by every row of one check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowParams {
    pub n: usize,
    pub p: f64,
    pub s: f64,
    pub q: Option<f64>,
    pub kappa: Option<f64>,
    pub points: usize,
    pub half_width: f64,
}

/// One line of a report. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub n: usize,
    pub p: f64,
    pub s: f64,
    pub q: Option<f64>,
    pub kappa: Option<f64>,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub seconds: f64,
    #[serde(skip)]
    pub order: (usize, usize),
}

impl ReportRow {
    pub fn new(
        experiment: impl Into<String>,
        params: &RowParams,
        lhs: f64,
        rhs: f64,
        pass: bool,
        seconds: f64,
    ) -> Self {
        let ratio = lhs / rhs;
        Self {
            experiment: experiment.into(),
            n: params.n,
            p: params.p,
            s: params.s,
            q: params.q,
            kappa: params.kappa,
            points: params.points,
            half_width: params.half_width,
            lhs,
            rhs,
            ratio,
            pass: pass && ratio.is_finite(),
            seconds,
            order: (0, 0),
        }
    }
}

/// Stable ordering by (suite, position within suite).
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by_key(|r| r.order);
}

#[derive(Serialize)]
struct JsonReport<'a> {
    config: &'a BTreeMap<String, String>,
    rows: &'a [ReportRow],
}

pub fn write_reports(
    dir: &Path,
    stem: &str,
    config: &BTreeMap<String, String>,
    rows: &[ReportRow],
) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));

    let mut writer = csv::Writer::from_path(&csv_path)
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record([
            "experiment",
            "n",
            "p",
            "s",
            "q",
            "kappa",
            "N",
            "L",
            "lhs",
            "rhs",
            "ratio",
            "pass",
            "seconds",
        ])?;
    }
    writer.flush()?;

    let mut file = fs::File::create(&json_path)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    serde_json::to_writer_pretty(&mut file, &JsonReport { config, rows })?;
    writeln!(file)?;
    Ok((csv_path, json_path))
}

pub fn summary_table(rows: &[ReportRow]) -> String {
    let width = rows
        .iter()
        .map(|r| r.experiment.chars().count())
        .max()
        .unwrap_or(0)
        .max("experiment".len());
    let mut out = format!(
        "{:<width$}  {:>14}  {:>14}  {:>10}  {:>4}  {:>8}\n",
        "experiment", "lhs", "rhs", "ratio", "pass", "seconds"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<width$}  {:>14.6e}  {:>14.6e}  {:>10.6}  {:>4}  {:>8.3}\n",
            r.experiment,
            r.lhs,
            r.rhs,
            r.ratio,
            if r.pass { "ok" } else { "FAIL" },
            r.seconds
        ));
    }
    out
}
