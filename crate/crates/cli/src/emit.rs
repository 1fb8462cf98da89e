//! Writers for run reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::config::Format;
use crate::estimator::Outcome;
use crate::run::{Record, RunReport, Timings};

pub const CSV_COLUMNS: [&str; 22] = [
    "index",
    "case",
    "kind",
    "approximation",
    "level",
    "epsilon",
    "seed",
    "estimator",
    "label",
    "status",
    "passed",
    "lhs",
    "rhs",
    "rel_residual",
    "worst_check",
    "lower",
    "true",
    "upper",
    "gamma",
    "efficiency_upper",
    "efficiency_lower",
    "message",
];

pub const PLOT_HEADER: &str = "# epsilon true lower upper efficiency";

/// 17 significant digits, enough to round-trip every `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn file_name(format: Format) -> &'static str {
    match format {
        Format::Json => "report.json",
        Format::Csv => "report.csv",
        Format::Plotdata => "plotdata.dat",
    }
}

pub fn to_json(report: &RunReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn status(r: &Record) -> &'static str {
    match r.outcome {
        Outcome::Equality { .. } => "equality",
        Outcome::Bound { .. } => "bound",
        Outcome::Majorant { .. } => "majorant",
        Outcome::Error { .. } => "error",
    }
}

fn csv_row(r: &Record) -> Vec<String> {
    let a = r.approximation.as_ref();
    let mut row = vec![
        r.index.to_string(),
        r.case.clone(),
        r.kind.as_str().to_string(),
        a.map(|a| a.name.clone()).unwrap_or_default(),
        a.map(|a| a.level.as_str().to_string()).unwrap_or_default(),
        opt(a.map(|a| a.epsilon)),
        a.map(|a| a.seed.to_string()).unwrap_or_default(),
        r.estimator.as_str().to_string(),
        r.label.clone(),
        status(r).to_string(),
        r.passed.to_string(),
    ];
    let empty = || String::new();
    match &r.outcome {
        Outcome::Equality { report } => {
            row.extend([
                num(report.lhs_total),
                num(report.rhs_total),
                num(report.rel_residual),
                num(report.worst_residual()),
            ]);
            row.extend((0..6).map(|_| empty()));
            row.push(r.violations.join("; "));
        }
        Outcome::Bound { report } | Outcome::Majorant { report, .. } => {
            row.extend((0..3).map(|_| empty()));
            row.extend([
                num(report.worst_check()),
                num(report.lower),
                num(report.true_total),
                num(report.upper),
                opt(report.gamma),
                opt(report.efficiency_upper),
                opt(report.efficiency_lower),
                r.violations.join("; "),
            ]);
        }
        Outcome::Error { message } => {
            row.extend((0..10).map(|_| empty()));
            row.push(message.clone());
        }
    }
    row
}

pub fn to_csv(report: &RunReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for r in &report.records {
        w.write_record(csv_row(r))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Bound records grouped by estimator label, one block per label in order of first
/// appearance, blocks separated by two blank lines.
pub fn to_plotdata(report: &RunReport) -> String {
    let mut labels: Vec<&str> = Vec::new();
    for r in &report.records {
        if r.outcome.bound_report().is_some() && !labels.contains(&r.label.as_str()) {
            labels.push(&r.label);
        }
    }
    let mut out = String::new();
    out.push_str(PLOT_HEADER);
    out.push('\n');
    for (i, label) in labels.iter().enumerate() {
        if i > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# estimator {label}\n"));
        for r in report.records.iter().filter(|r| r.label == *label) {
            let Some(b) = r.outcome.bound_report() else {
                continue;
            };
            let eps = r.approximation.as_ref().map_or(0.0, |a| a.epsilon);
            let eff = b.efficiency_upper.map_or_else(|| "nan".to_string(), num);
            out.push_str(&format!(
                "{} {} {} {} {}\n",
                num(eps),
                num(b.true_total),
                num(b.lower),
                num(b.upper),
                eff
            ));
        }
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

/// Write the requested formats plus the `timings.json` sidecar into `dir`.
pub fn emit(
    report: &RunReport,
    timings: Option<&Timings>,
    formats: &[Format],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for &f in formats {
        let path = dir.join(file_name(f));
        let text = match f {
            Format::Json => to_json(report)?,
            Format::Csv => to_csv(report)?,
            Format::Plotdata => to_plotdata(report),
        };
        write(&path, &text)?;
        written.push(path);
    }
    if let Some(t) = timings {
        let path = dir.join("timings.json");
        write(&path, &(serde_json::to_string_pretty(t)? + "\n"))?;
        written.push(path);
    }
    Ok(written)
}
