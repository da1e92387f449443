//! A posteriori accuracy: Runge-rule error estimates on refined grids and the
//! observed order of convergence.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::newton::{solve, NewtonSettings};
use crate::order::OperatorKind;
use crate::problem::{Problem, SolutionSeries};
use crate::{Error, Result};

/// Grid sizes `N_0, 2N_0 + 1, 2(2N_0 + 1) + 1, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementSchedule {
    levels: Vec<usize>,
}

impl RefinementSchedule {
    pub fn new(base: usize, count: usize) -> Result<Self> {
        let levels = std::iter::successors(Some(base), |n| Some(2 * n + 1))
            .take(count)
            .collect();
        Self::from_levels(levels)
    }

    /// `129, 259, 519, 1039, 2079`.
    pub fn standard() -> Self {
        Self::new(129, 5).expect("standard schedule is valid")
    }

    pub fn from_levels(levels: Vec<usize>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 2 levels to estimate an order, got {}",
                levels.len()
            )));
        }
        if levels[0] == 0 {
            return Err(Error::InvalidSchedule("base level must be positive".into()));
        }
        for w in levels.windows(2) {
            if w[1] != 2 * w[0] + 1 {
                return Err(Error::InvalidSchedule(format!(
                    "{} does not follow {} by N -> 2N + 1",
                    w[1], w[0]
                )));
            }
        }
        Ok(RefinementSchedule { levels })
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }
}

/// Logarithm base used to turn an error ratio into an order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBase {
    #[default]
    Two,
    /// `h_prev / h_cur`.
    StepRatio,
}

/// How fine-grid values are matched to coarse nodes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alignment {
    /// Coarse node `k` against fine node `2k − 1`.
    #[default]
    Literal,
    /// Coarse node `k` against the fine solution linearly interpolated at
    /// the coarse node's time.
    Interpolated,
}

/// Which grid pair produces the error printed on the row for level `N`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowPairing {
    /// Grid `(N − 1)/2` against grid `N`.
    #[default]
    PrecedingCoarse,
    /// Grid `N` against grid `2N + 1`.
    FollowingFine,
}

impl RowPairing {
    fn pair(self, level: usize) -> Result<(usize, usize)> {
        match self {
            RowPairing::FollowingFine => Ok((level, 2 * level + 1)),
            RowPairing::PrecedingCoarse => {
                if level < 3 || level % 2 == 0 {
                    return Err(Error::InvalidSchedule(format!(
                        "level {level} has no coarse partner (N − 1)/2"
                    )));
                }
                Ok(((level - 1) / 2, level))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyOptions {
    pub p_aprior: u32,
    pub log_base: LogBase,
    pub alignment: Alignment,
    pub pairing: RowPairing,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            p_aprior: 1,
            log_base: LogBase::Two,
            alignment: Alignment::Literal,
            pairing: RowPairing::PrecedingCoarse,
        }
    }
}

fn check_refinement(coarse: &SolutionSeries, fine: &SolutionSeries) -> Result<()> {
    let expected = 2 * coarse.len() + 1;
    if fine.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: fine.len(),
        });
    }
    Ok(())
}

fn runge_denominator(p_aprior: u32) -> f64 {
    2f64.powi(p_aprior as i32) - 1.0
}

/// `max_k |u_fine[2k − 1] − u_coarse[k]| / (2^p − 1)`, nodes 1-based.
pub fn runge_error(coarse: &SolutionSeries, fine: &SolutionSeries, p_aprior: u32) -> Result<f64> {
    check_refinement(coarse, fine)?;
    let max = coarse
        .values
        .iter()
        .enumerate()
        .map(|(k, u)| (fine.values[2 * k] - u).abs())
        .fold(0.0, f64::max);
    Ok(max / runge_denominator(p_aprior))
}

/// Runge error with the fine solution interpolated at the coarse node times.
pub fn runge_error_interpolated(
    coarse: &SolutionSeries,
    fine: &SolutionSeries,
    u0: f64,
    p_aprior: u32,
) -> Result<f64> {
    check_refinement(coarse, fine)?;
    let step = fine.times[0];
    let value = |j: usize| if j == 0 { u0 } else { fine.values[j - 1] };
    let max = coarse
        .times
        .iter()
        .zip(&coarse.values)
        .map(|(&t, &u)| {
            let x = t / step;
            let j = (x.floor() as usize).min(fine.len() - 1);
            let frac = x - j as f64;
            let interp = value(j) + frac * (value(j + 1) - value(j));
            (interp - u).abs()
        })
        .fold(0.0, f64::max);
    Ok(max / runge_denominator(p_aprior))
}

/// Observed order `log₂(ε_prev / ε_cur)`.
pub fn observed_order(eps_prev: f64, eps_cur: f64, h_prev: f64, h_cur: f64) -> Result<f64> {
    observed_order_with_base(eps_prev, eps_cur, h_prev, h_cur, LogBase::Two)
}

pub fn observed_order_with_base(
    eps_prev: f64,
    eps_cur: f64,
    h_prev: f64,
    h_cur: f64,
    base: LogBase,
) -> Result<f64> {
    for v in [eps_prev, eps_cur, h_prev, h_cur] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain {
                function: "observed_order",
                argument: v,
            });
        }
    }
    let ratio = (eps_prev / eps_cur).ln();
    Ok(match base {
        LogBase::Two => ratio / std::f64::consts::LN_2,
        LogBase::StepRatio => ratio / (h_prev / h_cur).ln(),
    })
}

/// Error and order of one operator variant on one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowEntry {
    pub eps: f64,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub nodes: usize,
    pub step: f64,
    pub alpha: Option<RowEntry>,
    pub gamma: Option<RowEntry>,
}

impl ReportRow {
    pub fn entry(&self, kind: OperatorKind) -> Option<RowEntry> {
        match kind {
            OperatorKind::CurrentTime => self.alpha,
            OperatorKind::LagTime => self.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub horizon: f64,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// Error sequence of one variant along the schedule.
    pub fn errors(&self, kind: OperatorKind) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.entry(kind)).map(|e| e.eps).collect()
    }

    /// Observed orders of one variant (rows 2..).
    pub fn orders(&self, kind: OperatorKind) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.entry(kind))
            .filter_map(|e| e.order)
            .collect()
    }
}

/// Solves `template` at every grid the schedule needs, for each requested
/// operator variant, and assembles the error/order table.
///
/// Independent solves run in parallel; the report is ordered by level.
pub fn run_study(
    template: &Problem,
    schedule: &RefinementSchedule,
    variants: &[OperatorKind],
    settings: &NewtonSettings,
    options: &StudyOptions,
) -> Result<ConvergenceReport> {
    let pairs = schedule
        .levels()
        .iter()
        .map(|&n| options.pairing.pair(n))
        .collect::<Result<Vec<_>>>()?;

    let mut jobs: Vec<(usize, OperatorKind)> = Vec::new();
    for &kind in variants {
        for &(c, f) in &pairs {
            for n in [c, f] {
                if !jobs.contains(&(n, kind)) {
                    jobs.push((n, kind));
                }
            }
        }
    }

    let solved: BTreeMap<(usize, OperatorKind), SolutionSeries> = jobs
        .par_iter()
        .map(|&(n, kind)| {
            let wrap = |e: Error| Error::Study {
                nodes: n,
                kind,
                source: Box::new(e),
            };
            let problem = template.with_nodes(n).and_then(|p| p.with_kind(kind)).map_err(wrap)?;
            let outcome = solve(&problem, settings).map_err(wrap)?;
            Ok(((n, kind), outcome.solution))
        })
        .collect::<Result<_>>()?;

    let horizon = template.grid.horizon();
    let mut rows: Vec<ReportRow> = schedule
        .levels()
        .iter()
        .map(|&n| ReportRow {
            nodes: n,
            step: horizon / n as f64,
            alpha: None,
            gamma: None,
        })
        .collect();

    for &kind in variants {
        let mut prev: Option<(f64, f64)> = None;
        for (row, &(c, f)) in rows.iter_mut().zip(&pairs) {
            let coarse = &solved[&(c, kind)];
            let fine = &solved[&(f, kind)];
            let eps = match options.alignment {
                Alignment::Literal => runge_error(coarse, fine, options.p_aprior)?,
                Alignment::Interpolated => {
                    runge_error_interpolated(coarse, fine, template.u0, options.p_aprior)?
                }
            };
            let order = match prev {
                Some((eps_prev, h_prev)) => Some(observed_order_with_base(
                    eps_prev,
                    eps,
                    h_prev,
                    row.step,
                    options.log_base,
                )?),
                None => None,
            };
            prev = Some((eps, row.step));
            let entry = Some(RowEntry { eps, order });
            match kind {
                OperatorKind::CurrentTime => row.alpha = entry,
                OperatorKind::LagTime => row.gamma = entry,
            }
        }
    }

    Ok(ConvergenceReport { horizon, rows })
}
