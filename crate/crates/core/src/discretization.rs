//! L1-type discretization of the variable-order operator.
//!
//! On the uniform grid `t_k = k·h` the memory integral at `t_k` is
//! approximated by
//!
//! ```text
//! Σ_{i=1..k} ω_i · (u_{k−i+1} − u_{k−i}),
//! ω_i = h^(−g_i) / Γ(2 − g_i) · (i^(1−g_i) − (i−1)^(1−g_i)),
//! ```
//!
//! i.e. the exact integral of the power-law kernel against the piecewise
//! linear interpolant of `u`. For the current-time operator `g_i = α(t_k)`
//! for every `i`; for the lag operator `g_i = γ(lag_i)` with `lag_i` inside
//! the i-th lag interval, so the weights do not depend on `k`.

use crate::newton::LowerTriangular;
use crate::order::OperatorKind;
use crate::problem::{Coefficients, Problem};
use crate::special::gamma;
use crate::Result;

fn weight_scale(order: f64, step: f64) -> Result<f64> {
    Ok(step.powf(-order) / gamma(2.0 - order)?)
}

fn weight_increment(i: usize, order: f64) -> f64 {
    let e = 1.0 - order;
    (i as f64).powf(e) - ((i - 1) as f64).powf(e)
}

/// Single L1 weight `ω_i` for a given order and step.
pub fn l1_weight(i: usize, order: f64, step: f64) -> Result<f64> {
    Ok(weight_scale(order, step)? * weight_increment(i, order))
}

fn lag_order(problem: &Problem, i: usize) -> Result<f64> {
    let h = problem.grid.step();
    let lag = problem.sampling.lag_sampling.lag_index(i) * h;
    problem.order.eval_on_grid(lag, h, problem.sampling.order_argument)
}

fn time_order(problem: &Problem, k: usize) -> Result<f64> {
    let h = problem.grid.step();
    problem
        .order
        .eval_on_grid(problem.grid.time(k), h, problem.sampling.order_argument)
}

/// Weights `ω_1..ω_k` for target node `k`, computed from scratch.
pub fn weights(problem: &Problem, k: usize) -> Result<Vec<f64>> {
    assert!(k >= 1 && k <= problem.grid.nodes(), "node index {k} out of range");
    let h = problem.grid.step();
    match problem.kind() {
        OperatorKind::CurrentTime => {
            let g = time_order(problem, k)?;
            (1..=k).map(|i| l1_weight(i, g, h)).collect()
        }
        OperatorKind::LagTime => (1..=k).map(|i| l1_weight(i, lag_order(problem, i)?, h)).collect(),
    }
}

/// Weights for every target node of a problem.
///
/// Lag-order weights are shared across rows; current-time weights are stored
/// per row in packed lower-triangular layout.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightTable {
    Shared(Vec<f64>),
    PerRow(Vec<f64>),
}

impl WeightTable {
    pub fn build(problem: &Problem) -> Result<Self> {
        let n = problem.grid.nodes();
        let h = problem.grid.step();
        match problem.kind() {
            OperatorKind::LagTime => {
                let w = (1..=n)
                    .map(|i| l1_weight(i, lag_order(problem, i)?, h))
                    .collect::<Result<Vec<_>>>()?;
                Ok(WeightTable::Shared(w))
            }
            OperatorKind::CurrentTime => {
                let mut data = Vec::with_capacity(n * (n + 1) / 2);
                for k in 1..=n {
                    let g = time_order(problem, k)?;
                    let scale = weight_scale(g, h)?;
                    data.extend((1..=k).map(|i| scale * weight_increment(i, g)));
                }
                Ok(WeightTable::PerRow(data))
            }
        }
    }

    /// `ω_1..ω_k` for target node `k` (1-based).
    pub fn row(&self, k: usize) -> &[f64] {
        match self {
            WeightTable::Shared(w) => &w[..k],
            WeightTable::PerRow(data) => {
                let start = k * (k - 1) / 2;
                &data[start..start + k]
            }
        }
    }
}

/// Residual and Jacobian of the difference scheme for one problem.
#[derive(Debug, Clone)]
pub struct Discretization {
    nodes: usize,
    u0: f64,
    weights: WeightTable,
    coeffs: Vec<Coefficients>,
}

impl Discretization {
    pub fn new(problem: &Problem) -> Result<Self> {
        let nodes = problem.grid.nodes();
        Ok(Discretization {
            nodes,
            u0: problem.u0,
            weights: WeightTable::build(problem)?,
            coeffs: (1..=nodes).map(|k| problem.coeffs.at_node(k, nodes)).collect(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    /// Coefficients at node `k` (1-based).
    pub fn coeffs(&self, k: usize) -> Coefficients {
        self.coeffs[k - 1]
    }

    fn prev(&self, u: &[f64], k: usize) -> f64 {
        if k == 1 {
            self.u0
        } else {
            u[k - 2]
        }
    }

    /// Memory sum at node `k` excluding the `i = 1` term.
    pub fn history(&self, u: &[f64], k: usize) -> f64 {
        let w = self.weights.row(k);
        (2..=k)
            .map(|i| w[i - 1] * (u[k - i] - self.prev(u, k - i + 1)))
            .sum()
    }

    /// `f_k` for `u = (u_1..u_N)`, `k` 1-based.
    pub fn residual(&self, u: &[f64], k: usize) -> f64 {
        debug_assert_eq!(u.len(), self.nodes);
        let w = self.weights.row(k);
        let x = u[k - 1];
        let memory = w[0] * (x - self.prev(u, k)) + self.history(u, k);
        let c = self.coeffs[k - 1];
        memory + c.a * x * x + c.b * x + c.c
    }

    pub fn residual_vector(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.nodes);
        let diffs: Vec<f64> = (1..=self.nodes).map(|j| u[j - 1] - self.prev(u, j)).collect();
        (1..=self.nodes)
            .map(|k| {
                let w = self.weights.row(k);
                let memory: f64 = w.iter().enumerate().map(|(i, wi)| wi * diffs[k - 1 - i]).sum();
                let x = u[k - 1];
                let c = self.coeffs[k - 1];
                memory + c.a * x * x + c.b * x + c.c
            })
            .collect()
    }

    /// `∂f_n/∂u_m`, 1-based; zero above the diagonal.
    pub fn jacobian_entry(&self, u: &[f64], n: usize, m: usize) -> f64 {
        if m > n {
            return 0.0;
        }
        let w = self.weights.row(n);
        if m == n {
            let c = self.coeffs[n - 1];
            w[0] + 2.0 * c.a * u[n - 1] + c.b
        } else {
            let j = n - m;
            w[j] - w[j - 1]
        }
    }

    pub fn jacobian(&self, u: &[f64]) -> LowerTriangular {
        let mut j = LowerTriangular::zeros(self.nodes);
        for n in 1..=self.nodes {
            let row = j.row_mut(n - 1);
            for (m, entry) in row.iter_mut().enumerate() {
                *entry = self.jacobian_entry(u, n, m + 1);
            }
        }
        j
    }
}

/// `f_k` for a problem, building the weights on the fly.
pub fn residual(problem: &Problem, u: &[f64], k: usize) -> Result<f64> {
    Ok(Discretization::new(problem)?.residual(u, k))
}

/// `R_{n,m}` for a problem, building the weights on the fly.
pub fn jacobian_entry(problem: &Problem, u: &[f64], n: usize, m: usize) -> Result<f64> {
    Ok(Discretization::new(problem)?.jacobian_entry(u, n, m))
}
