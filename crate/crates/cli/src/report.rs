//! Error reports and the files they are written to.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use fracdiff::SlopeFit;
use serde::Serialize;
use serde_json::{json, Value};

/// Exact values below this magnitude get no relative error.
pub const REL_ERR_FLOOR: f64 = 1e-14;

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRow {
    pub t: f64,
    pub approx: f64,
    pub exact: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
}

impl PointRow {
    pub fn new(t: f64, approx: f64, exact: Option<f64>) -> Self {
        let abs_err = exact.map(|e| (approx - e).abs());
        let rel_err = match (exact, abs_err) {
            (Some(e), Some(a)) if e.abs() >= REL_ERR_FLOOR => Some(a / e.abs()),
            _ => None,
        };
        Self {
            t,
            approx,
            exact,
            abs_err,
            rel_err,
        }
    }
}

/// Summary of a log-log fit, as stored in the sidecar.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub excluded_first: bool,
    pub points_used: usize,
    pub expected_slope: f64,
}

impl FitSummary {
    pub fn new(fit: SlopeFit<f64>, expected_slope: f64) -> Self {
        Self {
            slope: fit.slope,
            intercept: fit.intercept,
            stderr: fit.stderr,
            excluded_first: fit.excluded_first,
            points_used: fit.points_used,
            expected_slope,
        }
    }
}

/// Pointwise table with its maximum error.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub rows: Vec<PointRow>,
    pub e_inf: Option<f64>,
}

impl ErrorReport {
    pub fn new(rows: Vec<PointRow>) -> Self {
        let e_inf = rows
            .iter()
            .map(|r| r.abs_err)
            .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)));
        Self { rows, e_inf }
    }
}

/// `<prefix>_<kind>.<ext>`
pub fn output_path(prefix: &Path, kind: &str, ext: &str) -> PathBuf {
    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    prefix.with_file_name(format!("{stem}_{kind}.{ext}"))
}

fn create_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    Ok(())
}

pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    create_parent(path)?;
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_pointwise(path: &Path, report: &ErrorReport) -> Result<()> {
    write_table(
        path,
        &["t", "approx", "exact", "abs_err", "rel_err"],
        report.rows.iter().map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.approx),
                fmt_opt(r.exact),
                fmt_opt(r.abs_err),
                fmt_opt(r.rel_err),
            ]
        }),
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    create_parent(path)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Sidecar with provenance. Holds the only non-deterministic field.
pub fn write_meta(path: &Path, command: &str, config: &impl Serialize, summary: Value) -> Result<()> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "fracdiff",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": fracdiff::VERSION,
        "command": command,
        "timestamp_unix": timestamp,
        "config": config,
        "summary": summary,
    });
    write_text(path, &(serde_json::to_string_pretty(&meta)? + "\n"))
}

/// Gnuplot commands plotting columns of a CSV that sits next to the script.
pub struct PlotScript {
    pub csv: PathBuf,
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub log_x: bool,
    pub log_y: bool,
    /// `(x column, y column, legend)`, 1-based.
    pub series: Vec<(usize, usize, String)>,
}

impl PlotScript {
    pub fn render(&self) -> String {
        let csv = self
            .csv
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let png = csv.trim_end_matches(".csv").to_string() + ".png";
        let mut s = String::new();
        s.push_str(&format!("# gnuplot script for {csv}\n"));
        s.push_str("set datafile separator ','\n");
        s.push_str("set terminal pngcairo size 900,600\n");
        s.push_str(&format!("set output '{png}'\n"));
        s.push_str(&format!("set title '{}'\n", self.title));
        s.push_str(&format!("set xlabel '{}'\n", self.xlabel));
        s.push_str(&format!("set ylabel '{}'\n", self.ylabel));
        if self.log_x {
            s.push_str("set logscale x\n");
        }
        if self.log_y {
            s.push_str("set logscale y\n");
        }
        s.push_str("set grid\n");
        let plots: Vec<String> = self
            .series
            .iter()
            .map(|(x, y, legend)| format!("'{csv}' every ::1 using {x}:{y} with linespoints title '{legend}'"))
            .collect();
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        s
    }
}
