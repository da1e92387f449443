//! Cauchy problem data: grid, coefficients, initial value and operator.

use std::fmt;
use std::sync::Arc;

use crate::order::{OperatorKind, OrderSpec, SamplingOptions};
use crate::special::gamma;
use crate::{Error, Result};

/// Uniform grid on `[0, T]` with `N` steps; unknowns live at `t_1..t_N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    horizon: f64,
    nodes: usize,
    step: f64,
}

impl Grid {
    pub fn new(horizon: f64, nodes: usize) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidGrid(format!("horizon {horizon} must be positive")));
        }
        if nodes == 0 {
            return Err(Error::InvalidGrid("node count must be at least 1".into()));
        }
        Ok(Grid {
            horizon,
            nodes,
            step: horizon / nodes as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `t_k = k·h`; `k = N` returns the horizon exactly.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.nodes {
            self.horizon
        } else {
            k as f64 * self.step
        }
    }

    /// `t_1, …, t_N`.
    pub fn times(&self) -> Vec<f64> {
        (1..=self.nodes).map(|k| self.time(k)).collect()
    }
}

/// `(a, b, c)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Coefficient functions of the normalized time `s = t/T = k/N ∈ [0, 1]`.
#[derive(Clone)]
pub enum CoefficientSet {
    Constant(Coefficients),
    /// `a = −s`, `b = 0`, `c = s`.
    Ramp,
    Custom(Arc<dyn Fn(f64) -> Coefficients + Send + Sync>),
}

impl fmt::Debug for CoefficientSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientSet::Constant(c) => f.debug_tuple("Constant").field(c).finish(),
            CoefficientSet::Ramp => f.write_str("Ramp"),
            CoefficientSet::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl CoefficientSet {
    pub fn ramp() -> Self {
        CoefficientSet::Ramp
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Self {
        CoefficientSet::Constant(Coefficients { a, b, c })
    }

    /// Coefficients at node `k` of an `N`-node grid.
    pub fn at_node(&self, k: usize, nodes: usize) -> Coefficients {
        match self {
            CoefficientSet::Constant(c) => *c,
            CoefficientSet::Ramp => {
                let s = k as f64 / nodes as f64;
                Coefficients { a: -s, b: 0.0, c: s }
            }
            CoefficientSet::Custom(f) => f(k as f64 / nodes as f64),
        }
    }

    /// Continuous-time coefficients at `t` on `[0, T]`.
    pub fn at_time(&self, t: f64, horizon: f64) -> Coefficients {
        match self {
            CoefficientSet::Constant(c) => *c,
            CoefficientSet::Ramp => {
                let s = t / horizon;
                Coefficients { a: -s, b: 0.0, c: s }
            }
            CoefficientSet::Custom(f) => f(t / horizon),
        }
    }
}

/// Memory kernel `K(t − τ) = (t − τ)^(−ord) / Γ(1 − ord)`.
///
/// The order is evaluated at `t` for [`OperatorKind::CurrentTime`] and at the
/// lag `t − τ` for [`OperatorKind::LagTime`]; the variant is taken from
/// `spec.kind`.
pub fn kernel_eval(spec: &OrderSpec, t: f64, tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau < t) {
        return Err(Error::Domain {
            function: "kernel_eval",
            argument: t - tau,
        });
    }
    let lag = t - tau;
    let ord = match spec.kind {
        OperatorKind::CurrentTime => spec.eval(t)?,
        OperatorKind::LagTime => spec.eval(lag)?,
    };
    Ok(lag.powf(-ord) / gamma(1.0 - ord)?)
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub grid: Grid,
    pub coeffs: CoefficientSet,
    pub u0: f64,
    pub order: OrderSpec,
    pub sampling: SamplingOptions,
}

impl Problem {
    pub fn new(grid: Grid, coeffs: CoefficientSet, u0: f64, order: OrderSpec) -> Result<Self> {
        Self::with_sampling(grid, coeffs, u0, order, SamplingOptions::default())
    }

    pub fn with_sampling(
        grid: Grid,
        coeffs: CoefficientSet,
        u0: f64,
        order: OrderSpec,
        sampling: SamplingOptions,
    ) -> Result<Self> {
        if !u0.is_finite() {
            return Err(Error::InvalidProblem(format!("initial value {u0} is not finite")));
        }
        order.validate_on_grid_with(&grid, sampling)?;
        for k in 1..=grid.nodes() {
            let c = coeffs.at_node(k, grid.nodes());
            if !(c.a.is_finite() && c.b.is_finite() && c.c.is_finite()) {
                return Err(Error::InvalidProblem(format!("non-finite coefficient at node {k}")));
            }
        }
        Ok(Problem {
            grid,
            coeffs,
            u0,
            order,
            sampling,
        })
    }

    /// Same problem on a grid with `nodes` steps over the same horizon.
    pub fn with_nodes(&self, nodes: usize) -> Result<Self> {
        let grid = Grid::new(self.grid.horizon(), nodes)?;
        Self::with_sampling(grid, self.coeffs.clone(), self.u0, self.order, self.sampling)
    }

    pub fn with_kind(&self, kind: OperatorKind) -> Result<Self> {
        Self::with_sampling(
            self.grid,
            self.coeffs.clone(),
            self.u0,
            self.order.with_kind(kind),
            self.sampling,
        )
    }

    pub fn kind(&self) -> OperatorKind {
        self.order.kind
    }
}

/// Solution values `u_1..u_N` at `t_1..t_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub newton_iterations: usize,
    pub final_residual_norm: f64,
}

impl SolutionSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Maximum absolute pointwise difference; series must share a grid.
    pub fn max_abs_diff(&self, other: &SolutionSeries) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}
