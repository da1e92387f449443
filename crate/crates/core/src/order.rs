//! Variable fractional orders.
//!
//! An [`OrderSpec`] pairs an order function with the operator flavour it
//! drives: the order may depend on the current time (`α(t)`) or on the lag
//! between the current time and the integration variable (`γ(t − τ)`).

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::problem::Grid;
use crate::{Error, Result};

/// Which argument the order function receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    /// Order frozen at the current time, `α(t)`.
    CurrentTime,
    /// Order varies with the lag `t − τ`, `γ(t − τ)`.
    LagTime,
}

impl OperatorKind {
    pub const BOTH: [OperatorKind; 2] = [OperatorKind::CurrentTime, OperatorKind::LagTime];

    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::CurrentTime => "alpha",
            OperatorKind::LagTime => "gamma",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderForm {
    Constant(f64),
    /// `(θ·cos(μ·x) + 2δ) / 2`.
    Periodic { delta: f64, theta: f64, mu: f64 },
}

impl OrderForm {
    /// Closed-form `(min, max)` of the order over all arguments.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            OrderForm::Constant(v) => (v, v),
            OrderForm::Periodic { delta, theta, .. } => {
                let amp = theta.abs();
                ((2.0 * delta - amp) / 2.0, (2.0 * delta + amp) / 2.0)
            }
        }
    }

    fn raw(&self, arg: f64) -> f64 {
        match *self {
            OrderForm::Constant(v) => v,
            OrderForm::Periodic { delta, theta, mu } => (theta * (mu * arg).cos() + 2.0 * delta) / 2.0,
        }
    }
}

/// How the order function's argument relates to physical time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArgument {
    /// `cos(μ·x)` with `x` a physical time or lag.
    #[default]
    PhysicalTime,
    /// `cos(μ·h·x)`, the grid step multiplied into the argument.
    StepScaled,
}

/// Where inside the i-th lag interval `[(i−1)h, ih]` the lag order is sampled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagSampling {
    #[default]
    LeftEdge,
    Midpoint,
}

impl LagSampling {
    /// Lag in units of the grid step for the `i`-th weight (1-based).
    pub fn lag_index(self, i: usize) -> f64 {
        match self {
            LagSampling::LeftEdge => (i - 1) as f64,
            LagSampling::Midpoint => i as f64 - 0.5,
        }
    }
}

/// Knobs controlling how the order function is sampled by the scheme.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingOptions {
    pub order_argument: OrderArgument,
    pub lag_sampling: LagSampling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSpec {
    pub kind: OperatorKind,
    pub form: OrderForm,
    /// When set, evaluated orders are clamped into `[m, 1 − m]`.
    pub clamp: Option<f64>,
}

/// First grid argument at which the order leaves `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderViolation {
    pub argument: f64,
    pub value: f64,
}

impl From<OrderViolation> for Error {
    fn from(v: OrderViolation) -> Self {
        Error::OrderOutOfRange {
            argument: v.argument,
            value: v.value,
        }
    }
}

impl OrderSpec {
    pub fn constant(kind: OperatorKind, value: f64) -> Self {
        OrderSpec {
            kind,
            form: OrderForm::Constant(value),
            clamp: None,
        }
    }

    pub fn periodic(kind: OperatorKind, delta: f64, theta: f64, mu: f64) -> Self {
        OrderSpec {
            kind,
            form: OrderForm::Periodic { delta, theta, mu },
            clamp: None,
        }
    }

    pub fn with_clamp(mut self, margin: f64) -> Self {
        self.clamp = Some(margin);
        self
    }

    pub fn with_kind(mut self, kind: OperatorKind) -> Self {
        self.kind = kind;
        self
    }

    /// Checks that the order stays strictly inside `(0, 1)` for every
    /// argument, using the closed-form range (after clamping, if any).
    pub fn check_invariants(&self) -> Result<()> {
        let params_finite = match self.form {
            OrderForm::Constant(v) => v.is_finite(),
            OrderForm::Periodic { delta, theta, mu } => {
                delta.is_finite() && theta.is_finite() && mu.is_finite()
            }
        };
        if !params_finite {
            return Err(Error::InvalidOrder("non-finite parameter".into()));
        }
        if let Some(m) = self.clamp {
            if !(m > 0.0 && m < 0.5) {
                return Err(Error::InvalidOrder(format!("clamp margin {m} not in (0, 0.5)")));
            }
        }
        let (lo, hi) = self.clamped_range();
        if lo <= 0.0 || hi >= 1.0 {
            return Err(Error::InvalidOrder(format!(
                "order range [{lo}, {hi}] is not inside (0, 1)"
            )));
        }
        Ok(())
    }

    fn clamped_range(&self) -> (f64, f64) {
        let (lo, hi) = self.form.range();
        match self.clamp {
            Some(m) => (lo.clamp(m, 1.0 - m), hi.clamp(m, 1.0 - m)),
            None => (lo, hi),
        }
    }

    /// Order at argument `arg` (a time for `CurrentTime`, a lag for
    /// `LagTime`).
    pub fn eval(&self, arg: f64) -> Result<f64> {
        let mut value = self.form.raw(arg);
        if let Some(m) = self.clamp {
            value = value.clamp(m, 1.0 - m);
        }
        if value > 0.0 && value < 1.0 {
            Ok(value)
        } else {
            Err(OrderViolation { argument: arg, value }.into())
        }
    }

    /// Order at a grid argument, applying the argument interpretation.
    pub fn eval_on_grid(&self, arg: f64, step: f64, argument: OrderArgument) -> Result<f64> {
        match argument {
            OrderArgument::PhysicalTime => self.eval(arg),
            OrderArgument::StepScaled => self.eval(arg * step),
        }
    }

    /// Evaluates the order at every argument the scheme will use on `grid`.
    pub fn validate_on_grid(&self, grid: &Grid) -> std::result::Result<(), OrderViolation> {
        self.validate_on_grid_with(grid, SamplingOptions::default())
    }

    pub fn validate_on_grid_with(
        &self,
        grid: &Grid,
        options: SamplingOptions,
    ) -> std::result::Result<(), OrderViolation> {
        let h = grid.step();
        let check = |arg: f64| match self.eval_on_grid(arg, h, options.order_argument) {
            Ok(_) => Ok(()),
            Err(Error::OrderOutOfRange { value, .. }) => Err(OrderViolation { argument: arg, value }),
            Err(_) => Err(OrderViolation {
                argument: arg,
                value: f64::NAN,
            }),
        };
        match self.kind {
            OperatorKind::CurrentTime => (0..=grid.nodes()).try_for_each(|k| check(grid.time(k))),
            OperatorKind::LagTime => (1..=grid.nodes())
                .try_for_each(|i| check(options.lag_sampling.lag_index(i) * h)),
        }
    }
}

/// `μ = π/2`, the frequency used by all periodic presets.
pub const HALF_PI: f64 = PI / 2.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_at_zero() {
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.5, 0.5, HALF_PI);
        assert!((spec.eval(0.0).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn zero_amplitude_collapses_to_delta() {
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.5, 0.0, 123.4);
        assert_eq!(spec.eval(7.3).unwrap(), 0.5);
    }

    #[test]
    fn boundary_touching_zero_is_rejected() {
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.25, 0.5, HALF_PI);
        assert!(matches!(spec.check_invariants(), Err(Error::InvalidOrder(_))));
        // cos(π) = −1 gives exactly zero
        assert!(matches!(spec.eval(2.0), Err(Error::OrderOutOfRange { .. })));
    }

    #[test]
    fn clamp_admits_boundary_touching_forms() {
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.25, 0.5, HALF_PI).with_clamp(1e-9);
        spec.check_invariants().unwrap();
        assert_eq!(spec.eval(2.0).unwrap(), 1e-9);
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.75, 0.5, HALF_PI).with_clamp(1e-9);
        assert_eq!(spec.eval(0.0).unwrap(), 1.0 - 1e-9);
    }

    #[test]
    fn constant_validates_everywhere() {
        let grid = Grid::new(50.0, 129).unwrap();
        for kind in OperatorKind::BOTH {
            OrderSpec::constant(kind, 0.9999).validate_on_grid(&grid).unwrap();
        }
    }

    #[test]
    fn example2_clamped_validates() {
        let grid = Grid::new(50.0, 129).unwrap();
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.75, 0.5, HALF_PI).with_clamp(1e-9);
        spec.validate_on_grid(&grid).unwrap();
        spec.with_kind(OperatorKind::CurrentTime).validate_on_grid(&grid).unwrap();
    }

    #[test]
    fn example2_unclamped_hits_the_upper_endpoint() {
        let grid = Grid::new(50.0, 129).unwrap();
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.75, 0.5, HALF_PI);
        let v = spec.validate_on_grid(&grid).unwrap_err();
        assert_eq!(v.argument, 0.0);
        assert_eq!(v.value, 1.0);
    }

    #[test]
    fn negative_minimum_reports_first_violation() {
        let grid = Grid::new(50.0, 2000).unwrap();
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.1, 0.5, 1.0);
        let v = spec.validate_on_grid(&grid).unwrap_err();
        assert!(v.value <= 0.0);
        // order = (0.5 cos x + 0.2)/2 first drops to zero at cos x = −0.4
        let first_zero = (-0.4f64).acos();
        assert!(v.argument >= first_zero && v.argument < first_zero + grid.step());

        let alpha = spec.with_kind(OperatorKind::CurrentTime);
        let v = alpha.validate_on_grid(&grid).unwrap_err();
        assert!(v.argument >= first_zero && v.argument < first_zero + grid.step());
    }

    #[test]
    fn step_scaled_argument() {
        let spec = OrderSpec::periodic(OperatorKind::LagTime, 0.5, 0.5, HALF_PI);
        let a = spec.eval_on_grid(4.0, 0.5, OrderArgument::StepScaled).unwrap();
        let b = spec.eval(2.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lag_sampling_offsets() {
        assert_eq!(LagSampling::LeftEdge.lag_index(1), 0.0);
        assert_eq!(LagSampling::Midpoint.lag_index(1), 0.5);
        assert_eq!(LagSampling::LeftEdge.lag_index(4), 3.0);
    }
}
