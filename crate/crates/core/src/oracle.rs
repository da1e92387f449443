//! Reference computations that do not go through the global Newton solve.

use crate::discretization::Discretization;
use crate::problem::{CoefficientSet, Problem, SolutionSeries};
use crate::{Error, Result};

/// Classical RK4 for the integer-order limit `u' = −(a u² + b u + c)`.
///
/// Returns the solution at `t_j = j·T/steps`, `j = 1..steps`.
pub fn rk4_classic(coeffs: &CoefficientSet, u0: f64, horizon: f64, steps: usize) -> SolutionSeries {
    let h = horizon / steps as f64;
    let rhs = |t: f64, u: f64| {
        let c = coeffs.at_time(t, horizon);
        -(c.a * u * u + c.b * u + c.c)
    };
    let mut times = Vec::with_capacity(steps);
    let mut values = Vec::with_capacity(steps);
    let mut u = u0;
    for j in 0..steps {
        let t = j as f64 * h;
        let k1 = rhs(t, u);
        let k2 = rhs(t + 0.5 * h, u + 0.5 * h * k1);
        let k3 = rhs(t + 0.5 * h, u + 0.5 * h * k2);
        let k4 = rhs(t + h, u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        times.push(if j + 1 == steps { horizon } else { (j + 1) as f64 * h });
        values.push(u);
    }
    SolutionSeries {
        times,
        values,
        newton_iterations: 0,
        final_residual_norm: 0.0,
    }
}

/// Keeps every `stride`-th point, starting from the `stride`-th.
pub fn subsample(series: &SolutionSeries, stride: usize) -> SolutionSeries {
    let pick = |v: &[f64]| v.iter().skip(stride - 1).step_by(stride).copied().collect();
    SolutionSeries {
        times: pick(&series.times),
        values: pick(&series.values),
        newton_iterations: series.newton_iterations,
        final_residual_norm: series.final_residual_norm,
    }
}

/// Solves the difference scheme node by node: `f_k(u_k) = 0` by scalar
/// Newton with `u_1..u_{k−1}` frozen, starting from `u_{k−1}`.
pub fn sequential_march(problem: &Problem, eps: f64) -> Result<SolutionSeries> {
    const MAX_ITERATIONS: usize = 100;
    let disc = Discretization::new(problem)?;
    let n = disc.nodes();
    let mut u = vec![0.0; n];
    let mut total_iterations = 0;
    let mut prev = problem.u0;
    for k in 1..=n {
        let history = disc.history(&u, k);
        let w1 = disc.weights().row(k)[0];
        let c = disc.coeffs(k);
        let mut x = prev;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let f = w1 * (x - prev) + history + c.a * x * x + c.b * x + c.c;
            let df = w1 + 2.0 * c.a * x + c.b;
            let dx = f / df;
            x -= dx;
            total_iterations += 1;
            if !x.is_finite() {
                break;
            }
            if dx.abs() <= eps {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ScalarNonConvergence { node: k });
        }
        u[k - 1] = x;
        prev = x;
    }
    let final_residual_norm = disc.residual_vector(&u).iter().fold(0.0f64, |m, f| m.max(f.abs()));
    Ok(SolutionSeries {
        times: problem.grid.times(),
        values: u,
        newton_iterations: total_iterations,
        final_residual_norm,
    })
}
