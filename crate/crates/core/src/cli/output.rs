//! CSV emission. Numbers carry 17 significant digits so every value
//! round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::convergence::{ConvergenceReport, RowEntry};
use crate::problem::SolutionSeries;

pub const SOLUTION_HEADER: &str = "t,u";
pub const STUDY_HEADER: &str = "N,h,eps_alpha,p_alpha,eps_gamma,p_gamma";

pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn solution_csv(series: &SolutionSeries) -> String {
    let mut out = String::with_capacity(48 * (series.len() + 1));
    out.push_str(SOLUTION_HEADER);
    out.push('\n');
    for (t, u) in series.times.iter().zip(&series.values) {
        let _ = writeln!(out, "{},{}", format_number(*t), format_number(*u));
    }
    out
}

pub fn study_csv(report: &ConvergenceReport) -> String {
    let cells = |e: Option<RowEntry>| match e {
        None => (String::new(), String::new()),
        Some(e) => (format_number(e.eps), e.order.map(format_number).unwrap_or_default()),
    };
    let mut out = String::new();
    out.push_str(STUDY_HEADER);
    out.push('\n');
    for row in &report.rows {
        let (ea, pa) = cells(row.alpha);
        let (eg, pg) = cells(row.gamma);
        let _ = writeln!(out, "{},{},{ea},{pa},{eg},{pg}", row.nodes, format_number(row.step));
    }
    out
}

/// Parses a `t,u` CSV back into `(t, u)` pairs.
pub fn parse_solution_csv(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(SOLUTION_HEADER) => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let (t, u) = line
                .split_once(',')
                .ok_or_else(|| format!("line {}: expected two fields", i + 2))?;
            let parse = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 2));
            Ok((parse(t)?, parse(u)?))
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)
}
