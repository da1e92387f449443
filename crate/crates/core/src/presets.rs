//! Named experiment configurations.
//!
//! All presets run on `[0, 50]` with 2000 steps unless the caller overrides
//! the grid. The periodic orders share `θ = 0.5`, `μ = π/2` and differ in the
//! shift `δ`.

use std::fmt;
use std::str::FromStr;

use crate::order::{OperatorKind, OrderSpec, SamplingOptions, HALF_PI};
use crate::problem::{CoefficientSet, Grid, Problem};
use crate::Result;

pub const DEFAULT_HORIZON: f64 = 50.0;
pub const DEFAULT_NODES: usize = 2000;
pub const DEFAULT_U0: f64 = 0.0;

/// Stand-in for order 1, where the power-law kernel degenerates.
pub const NEAR_UNIT_ORDER: f64 = 0.9999;

/// Periodic presets whose closed-form range touches 0 or 1 are clamped
/// this far inside the open interval.
pub const ENDPOINT_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Constant order 0.9999, ramp coefficients.
    Example1,
    /// δ = 0.75: order in [0.5, 1).
    Example2,
    /// δ = 0.5: order in [0.25, 0.75].
    Example3,
    /// δ = 0.25: order in (0, 0.5].
    Example4,
    /// Constant order 0.9999 with constant coefficients (−1, 0, 1).
    FigureVerify,
}

impl Preset {
    pub const EXAMPLES: [Preset; 4] = [Preset::Example1, Preset::Example2, Preset::Example3, Preset::Example4];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Example1 => "example1",
            Preset::Example2 => "example2",
            Preset::Example3 => "example3",
            Preset::Example4 => "example4",
            Preset::FigureVerify => "figure-verify",
        }
    }

    /// `(δ, θ, μ)` for periodic presets.
    pub fn periodic_parameters(self) -> Option<(f64, f64, f64)> {
        match self {
            Preset::Example2 => Some((0.75, 0.5, HALF_PI)),
            Preset::Example3 => Some((0.5, 0.5, HALF_PI)),
            Preset::Example4 => Some((0.25, 0.5, HALF_PI)),
            Preset::Example1 | Preset::FigureVerify => None,
        }
    }

    pub fn order(self, kind: OperatorKind) -> OrderSpec {
        match self.periodic_parameters() {
            None => OrderSpec::constant(kind, NEAR_UNIT_ORDER),
            Some((delta, theta, mu)) => {
                let spec = OrderSpec::periodic(kind, delta, theta, mu);
                let (lo, hi) = spec.form.range();
                if lo <= 0.0 || hi >= 1.0 {
                    spec.with_clamp(ENDPOINT_CLAMP)
                } else {
                    spec
                }
            }
        }
    }

    pub fn coefficients(self) -> CoefficientSet {
        match self {
            Preset::FigureVerify => CoefficientSet::constant(-1.0, 0.0, 1.0),
            _ => CoefficientSet::ramp(),
        }
    }

    pub fn problem(self, kind: OperatorKind, horizon: f64, nodes: usize, u0: f64) -> Result<Problem> {
        self.problem_with(kind, horizon, nodes, u0, SamplingOptions::default())
    }

    pub fn problem_with(
        self,
        kind: OperatorKind,
        horizon: f64,
        nodes: usize,
        u0: f64,
        sampling: SamplingOptions,
    ) -> Result<Problem> {
        let grid = Grid::new(horizon, nodes)?;
        Problem::with_sampling(grid, self.coefficients(), u0, self.order(kind), sampling)
    }

    /// Default grid and initial value.
    pub fn default_problem(self, kind: OperatorKind) -> Result<Problem> {
        self.problem(kind, DEFAULT_HORIZON, DEFAULT_NODES, DEFAULT_U0)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "example1" => Ok(Preset::Example1),
            "example2" => Ok(Preset::Example2),
            "example3" => Ok(Preset::Example3),
            "example4" => Ok(Preset::Example4),
            "figure-verify" => Ok(Preset::FigureVerify),
            other => Err(format!("unknown preset '{other}'")),
        }
    }
}
