//! Command-line front end: configuration, experiment driver and CSV output.

mod config;
pub mod output;

use std::path::PathBuf;

use thiserror::Error;

pub use config::{parse_config, parse_config_with_env, Mode, PresetChoice, RunConfig, OUT_DIR_ENV};

use crate::convergence::run_study;
use crate::newton::solve;
use crate::oracle::{rk4_classic, subsample};
use crate::order::OperatorKind;
use crate::problem::SolutionSeries;

/// Steps of the classical integrator per grid step in verify mode.
pub const RK4_REFINEMENT: usize = 10;

#[derive(Debug, Error)]
pub enum CliError {
    /// Help or version text requested; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(#[from] crate::Error),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Comparison metrics printed by verify mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyMetrics {
    /// `max |u_alpha − u_gamma|` over grid nodes.
    pub operator_gap: f64,
    /// `max |u − u_rk4|` over grid nodes, worst of the two operators.
    pub classic_gap: f64,
    pub terminal_alpha: f64,
    pub terminal_gamma: f64,
    pub terminal_classic: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub verify: Option<VerifyMetrics>,
    pub lines: Vec<String>,
}

struct Output {
    path: PathBuf,
    contents: String,
}

/// Executes a configuration. All files are written after every computation
/// has finished.
pub fn run(config: &RunConfig) -> Result<RunSummary, CliError> {
    let mut summary = RunSummary::default();
    let mut outputs = Vec::new();
    let preset = config.preset.name();

    match config.mode {
        config::Mode::Solve => {
            for &kind in &config.variants {
                let problem = config.problem(kind, config.nodes)?;
                let outcome = solve(&problem, &config.settings)?;
                summary.lines.push(format!(
                    "{preset} {kind}: N={} iterations={} residual={:e} u(T)={}",
                    config.nodes,
                    outcome.iterations,
                    outcome.solution.final_residual_norm,
                    outcome.solution.last().unwrap_or(f64::NAN)
                ));
                outputs.push(Output {
                    path: config.out_dir.join(format!("solve_{preset}_{kind}.csv")),
                    contents: output::solution_csv(&outcome.solution),
                });
            }
        }
        config::Mode::Study => {
            let template = config.problem(config.variants[0], config.nodes)?;
            let schedule = config.schedule()?;
            let report = run_study(&template, &schedule, &config.variants, &config.settings, &config.study)?;
            for row in &report.rows {
                let cell = |kind| match row.entry(kind) {
                    Some(e) => format!(
                        "eps={:.6} p={}",
                        e.eps,
                        e.order.map(|p| format!("{p:.6}")).unwrap_or_else(|| "-".into())
                    ),
                    None => "-".into(),
                };
                summary.lines.push(format!(
                    "N={:5} h={:.3} alpha[{}] gamma[{}]",
                    row.nodes,
                    row.step,
                    cell(OperatorKind::CurrentTime),
                    cell(OperatorKind::LagTime)
                ));
            }
            outputs.push(Output {
                path: config.out_dir.join(format!("study_{preset}.csv")),
                contents: output::study_csv(&report),
            });
        }
        config::Mode::Verify => {
            let (metrics, alpha, gamma, classic) = verify(config)?;
            summary.lines.push(format!(
                "max|alpha-gamma|={:e} max|u-classic|={:e} u(T): alpha={} gamma={} classic={}",
                metrics.operator_gap,
                metrics.classic_gap,
                metrics.terminal_alpha,
                metrics.terminal_gamma,
                metrics.terminal_classic
            ));
            summary.verify = Some(metrics);
            for (name, series) in [("alpha", alpha), ("gamma", gamma), ("classic", classic)] {
                outputs.push(Output {
                    path: config.out_dir.join(format!("verify_{name}.csv")),
                    contents: output::solution_csv(&series),
                });
            }
        }
    }

    for out in outputs {
        output::write_file(&out.path, &out.contents)
            .map_err(|e| CliError::Io(format!("{}: {e}", out.path.display())))?;
        summary.files.push(out.path);
    }
    Ok(summary)
}

type VerifySeries = (VerifyMetrics, SolutionSeries, SolutionSeries, SolutionSeries);

fn verify(config: &RunConfig) -> Result<VerifySeries, CliError> {
    let alpha = solve(&config.problem(OperatorKind::CurrentTime, config.nodes)?, &config.settings)?.solution;
    let gamma = solve(&config.problem(OperatorKind::LagTime, config.nodes)?, &config.settings)?.solution;
    let fine = rk4_classic(
        &config.coefficients,
        config.u0,
        config.horizon,
        RK4_REFINEMENT * config.nodes,
    );
    let classic = subsample(&fine, RK4_REFINEMENT);
    let metrics = VerifyMetrics {
        operator_gap: alpha.max_abs_diff(&gamma)?,
        classic_gap: alpha.max_abs_diff(&classic)?.max(gamma.max_abs_diff(&classic)?),
        terminal_alpha: alpha.last().unwrap_or(f64::NAN),
        terminal_gamma: gamma.last().unwrap_or(f64::NAN),
        terminal_classic: classic.last().unwrap_or(f64::NAN),
    };
    Ok((metrics, alpha, gamma, classic))
}
