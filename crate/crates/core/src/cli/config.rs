use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use super::CliError;
use crate::convergence::{Alignment, LogBase, RefinementSchedule, RowPairing, StudyOptions};
use crate::newton::{InitialGuess, LinearBackend, NewtonSettings};
use crate::order::{LagSampling, OperatorKind, OrderArgument, OrderForm, OrderSpec, SamplingOptions};
use crate::presets::{self, Preset};
use crate::problem::{CoefficientSet, Grid, Problem};

pub const OUT_DIR_ENV: &str = "MEMRICCATI_OUT";

const STUDY_BASE: usize = 129;
const STUDY_LEVELS: usize = 5;

#[derive(Debug, Parser)]
#[command(
    name = "memriccati",
    version,
    about = "Variable-order fractional Riccati solver and convergence study",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem and write the solution as CSV.
    Solve(RawArgs),
    /// Run the grid-refinement study and write the error/order table.
    Study(RawArgs),
    /// Compare both operators with the classical solution at order ≈ 1.
    Verify(RawArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetArg {
    Example1,
    Example2,
    Example3,
    Example4,
    FigureVerify,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Alpha,
    Gamma,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientsArg {
    Ramp,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendArg {
    Triangular,
    GaussJordan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuessArg {
    Predictor,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArgumentArg {
    Physical,
    StepScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagSamplingArg {
    Left,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBaseArg {
    Two,
    StepRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlignmentArg {
    Literal,
    Interpolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingArg {
    Preceding,
    Following,
}

/// Options shared by every mode. Every field is optional so that values
/// from a config file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RawArgs {
    /// TOML file with default values for any of the options below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,
    /// Operator variant(s) to run.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,

    /// Time horizon.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    /// Node count (solve, verify) or base of the refinement schedule (study).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub nodes: Option<usize>,
    /// Number of refinement levels (study).
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: Option<f64>,

    /// Periodic order shift (custom preset).
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Periodic order amplitude (custom preset).
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Periodic order frequency (custom preset).
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Constant order (custom preset).
    #[arg(long)]
    pub order: Option<f64>,
    #[arg(long, value_enum)]
    pub coefficients: Option<CoefficientsArg>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,

    /// Newton step-norm tolerance.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    #[arg(long, value_enum)]
    pub initial_guess: Option<GuessArg>,

    #[arg(long, value_enum)]
    pub order_argument: Option<OrderArgumentArg>,
    #[arg(long, value_enum)]
    pub lag_sampling: Option<LagSamplingArg>,
    #[arg(long, value_enum)]
    pub log_base: Option<LogBaseArg>,
    #[arg(long, value_enum)]
    pub alignment: Option<AlignmentArg>,
    #[arg(long, value_enum)]
    pub pairing: Option<PairingArg>,

    /// Output directory (falls back to $MEMRICCATI_OUT, then ".").
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($flags:expr, $file:expr; $($field:ident),* $(,)?) => {
        RawArgs {
            config: $flags.config.take(),
            $($field: $flags.$field.take().or($file.$field.take()),)*
        }
    };
}

impl RawArgs {
    fn merged_with(mut self, mut file: RawArgs) -> RawArgs {
        merge_fields!(self, file;
            preset, variant, horizon, nodes, levels, u0, delta, theta, mu, order,
            coefficients, a, b, c, eps, max_iterations, backend, initial_guess,
            order_argument, lag_sampling, log_base, alignment, pairing, out_dir)
    }

    /// Names of the flags that change the problem itself.
    fn model_overrides(&self) -> Vec<&'static str> {
        let mut set = Vec::new();
        let mut note = |present: bool, name| {
            if present {
                set.push(name)
            }
        };
        note(self.delta.is_some(), "--delta");
        note(self.theta.is_some(), "--theta");
        note(self.mu.is_some(), "--mu");
        note(self.order.is_some(), "--order");
        note(self.coefficients.is_some(), "--coefficients");
        note(self.a.is_some(), "--a");
        note(self.b.is_some(), "--b");
        note(self.c.is_some(), "--c");
        set
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Study,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetChoice {
    Named(Preset),
    Custom,
}

impl PresetChoice {
    pub fn name(self) -> &'static str {
        match self {
            PresetChoice::Named(p) => p.name(),
            PresetChoice::Custom => "custom",
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub preset: PresetChoice,
    pub variants: Vec<OperatorKind>,
    pub horizon: f64,
    /// Node count for solve/verify; schedule base for study.
    pub nodes: usize,
    pub levels: usize,
    pub u0: f64,
    pub order: OrderSpec,
    pub coefficients: CoefficientSet,
    pub settings: NewtonSettings,
    pub sampling: SamplingOptions,
    pub study: StudyOptions,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Problem for one operator variant on an `nodes`-step grid.
    pub fn problem(&self, kind: OperatorKind, nodes: usize) -> crate::Result<Problem> {
        let grid = Grid::new(self.horizon, nodes)?;
        Problem::with_sampling(
            grid,
            self.coefficients.clone(),
            self.u0,
            self.order.with_kind(kind),
            self.sampling,
        )
    }

    pub fn schedule(&self) -> crate::Result<RefinementSchedule> {
        RefinementSchedule::new(self.nodes, self.levels)
    }

    /// Every grid size this run will solve on.
    fn grids_used(&self) -> Result<Vec<usize>, CliError> {
        match self.mode {
            Mode::Solve | Mode::Verify => Ok(vec![self.nodes]),
            Mode::Study => {
                let schedule = self.schedule().map_err(|e| CliError::Usage(e.to_string()))?;
                let mut grids = schedule.levels().to_vec();
                match self.study.pairing {
                    RowPairing::PrecedingCoarse => grids.insert(0, (grids[0].saturating_sub(1)) / 2),
                    RowPairing::FollowingFine => grids.push(2 * grids[grids.len() - 1] + 1),
                }
                Ok(grids)
            }
        }
    }
}

/// Parses command-line arguments (program name first), reading
/// `MEMRICCATI_OUT` from the environment.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    parse_config_with_env(argv, std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
}

pub fn parse_config_with_env<I, T>(argv: I, env_out_dir: Option<PathBuf>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Help(e.render().to_string()),
            _ => CliError::Usage(e.render().to_string()),
        }
    })?;
    let (mode, mut raw) = match cli.command {
        Command::Solve(a) => (Mode::Solve, a),
        Command::Study(a) => (Mode::Study, a),
        Command::Verify(a) => (Mode::Verify, a),
    };
    if let Some(path) = raw.config.clone() {
        raw = raw.merged_with(read_config_file(&path)?);
    }
    resolve(mode, raw, env_out_dir)
}

fn read_config_file(path: &Path) -> Result<RawArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {}", path.display(), e.message())))
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn resolve(mode: Mode, raw: RawArgs, env_out_dir: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let preset = match (mode, raw.preset) {
        (Mode::Verify, None | Some(PresetArg::FigureVerify)) => PresetChoice::Named(Preset::FigureVerify),
        (Mode::Verify, Some(other)) => {
            return Err(usage(format!(
                "verify always runs the figure-verify preset, got --preset {}",
                other.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
            )))
        }
        (_, None) => return Err(usage("--preset is required for solve and study")),
        (_, Some(PresetArg::Custom)) => PresetChoice::Custom,
        (_, Some(p)) => PresetChoice::Named(named_preset(p)),
    };

    let (order, coefficients) = match preset {
        PresetChoice::Named(p) => {
            let overrides = raw.model_overrides();
            if !overrides.is_empty() {
                return Err(usage(format!(
                    "preset {} fixes the model; {} cannot be overridden (only --T, --N, --u0 and solver options)",
                    p.name(),
                    overrides.join(", ")
                )));
            }
            (p.order(OperatorKind::LagTime), p.coefficients())
        }
        PresetChoice::Custom => (custom_order(&raw)?, custom_coefficients(&raw)?),
    };

    let variants = match (mode, raw.variant.unwrap_or(VariantArg::Both)) {
        (Mode::Verify, _) | (_, VariantArg::Both) => OperatorKind::BOTH.to_vec(),
        (_, VariantArg::Alpha) => vec![OperatorKind::CurrentTime],
        (_, VariantArg::Gamma) => vec![OperatorKind::LagTime],
    };

    let default_nodes = if mode == Mode::Study { STUDY_BASE } else { presets::DEFAULT_NODES };
    let horizon = raw.horizon.unwrap_or(presets::DEFAULT_HORIZON);
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(usage(format!("--T must be positive, got {horizon}")));
    }
    let nodes = raw.nodes.unwrap_or(default_nodes);
    if nodes == 0 {
        return Err(usage("--N must be at least 1"));
    }
    let u0 = raw.u0.unwrap_or(presets::DEFAULT_U0);
    if !u0.is_finite() {
        return Err(usage(format!("--u0 must be finite, got {u0}")));
    }

    let mut settings = NewtonSettings::with_eps(raw.eps.unwrap_or(1e-4));
    if !(settings.eps > 0.0) {
        return Err(usage(format!("--eps must be positive, got {}", settings.eps)));
    }
    if let Some(m) = raw.max_iterations {
        if m == 0 {
            return Err(usage("--max-iterations must be at least 1"));
        }
        settings.max_iterations = m;
    }
    settings.linear_backend = match raw.backend {
        Some(BackendArg::GaussJordan) => LinearBackend::GaussJordan,
        _ => LinearBackend::TriangularSubstitution,
    };
    settings.initial_guess = match raw.initial_guess {
        Some(GuessArg::Constant) => InitialGuess::Constant,
        _ => InitialGuess::Predictor,
    };

    let sampling = SamplingOptions {
        order_argument: match raw.order_argument {
            Some(OrderArgumentArg::StepScaled) => OrderArgument::StepScaled,
            _ => OrderArgument::PhysicalTime,
        },
        lag_sampling: match raw.lag_sampling {
            Some(LagSamplingArg::Midpoint) => LagSampling::Midpoint,
            _ => LagSampling::LeftEdge,
        },
    };
    let study = StudyOptions {
        p_aprior: 1,
        log_base: match raw.log_base {
            Some(LogBaseArg::StepRatio) => LogBase::StepRatio,
            _ => LogBase::Two,
        },
        alignment: match raw.alignment {
            Some(AlignmentArg::Interpolated) => Alignment::Interpolated,
            _ => Alignment::Literal,
        },
        pairing: match raw.pairing {
            Some(PairingArg::Following) => RowPairing::FollowingFine,
            _ => RowPairing::PrecedingCoarse,
        },
    };

    let out_dir = raw
        .out_dir
        .or(env_out_dir)
        .unwrap_or_else(|| PathBuf::from("."));

    let config = RunConfig {
        mode,
        preset,
        variants,
        horizon,
        nodes,
        levels: raw.levels.unwrap_or(STUDY_LEVELS),
        u0,
        order,
        coefficients,
        settings,
        sampling,
        study,
        out_dir,
    };

    // Reject order-bound violations before any solve starts.
    for n in config.grids_used()? {
        let grid = Grid::new(horizon, n.max(1)).map_err(|e| usage(e.to_string()))?;
        for &kind in &config.variants {
            if let Err(v) = config.order.with_kind(kind).validate_on_grid_with(&grid, sampling) {
                return Err(usage(format!(
                    "order function leaves (0, 1) for the {kind} operator on the N={n} grid: value {} at argument {}",
                    v.value, v.argument
                )));
            }
        }
    }
    Ok(config)
}

fn named_preset(p: PresetArg) -> Preset {
    match p {
        PresetArg::Example1 => Preset::Example1,
        PresetArg::Example2 => Preset::Example2,
        PresetArg::Example3 => Preset::Example3,
        PresetArg::Example4 => Preset::Example4,
        PresetArg::FigureVerify => Preset::FigureVerify,
        PresetArg::Custom => unreachable!("custom handled by caller"),
    }
}

fn custom_order(raw: &RawArgs) -> Result<OrderSpec, CliError> {
    let periodic = [raw.delta, raw.theta, raw.mu];
    let spec = match (periodic, raw.order) {
        ([None, None, None], None) => OrderSpec::constant(OperatorKind::LagTime, presets::NEAR_UNIT_ORDER),
        ([None, None, None], Some(v)) => OrderSpec::constant(OperatorKind::LagTime, v),
        ([Some(delta), Some(theta), Some(mu)], None) => OrderSpec::periodic(OperatorKind::LagTime, delta, theta, mu),
        (_, Some(_)) => return Err(usage("--order cannot be combined with --delta/--theta/--mu")),
        _ => return Err(usage("a periodic order needs all of --delta, --theta and --mu")),
    };
    if let OrderForm::Constant(v) = spec.form {
        if !(v > 0.0 && v < 1.0) {
            return Err(usage(format!("order {v} is outside (0, 1)")));
        }
    }
    Ok(spec)
}

fn custom_coefficients(raw: &RawArgs) -> Result<CoefficientSet, CliError> {
    let any_constant = raw.a.is_some() || raw.b.is_some() || raw.c.is_some();
    match (raw.coefficients, any_constant) {
        (Some(CoefficientsArg::Ramp), true) => Err(usage("--a/--b/--c cannot be combined with --coefficients ramp")),
        (Some(CoefficientsArg::Ramp), false) | (None, false) => Ok(CoefficientSet::ramp()),
        (Some(CoefficientsArg::Constant), _) | (None, true) => Ok(CoefficientSet::constant(
            raw.a.unwrap_or(0.0),
            raw.b.unwrap_or(0.0),
            raw.c.unwrap_or(0.0),
        )),
    }
}
