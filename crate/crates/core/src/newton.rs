//! Global Newton–Raphson iteration for the discrete system `F(U) = 0`.

use serde::{Deserialize, Serialize};

use crate::discretization::Discretization;
use crate::problem::{Problem, SolutionSeries};
use crate::{Error, Result};

/// Square lower-triangular matrix in packed row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    size: usize,
    data: Vec<f64>,
}

impl LowerTriangular {
    pub fn zeros(size: usize) -> Self {
        LowerTriangular {
            size,
            data: vec![0.0; size * (size + 1) / 2],
        }
    }

    /// Builds from dense rows; entries above the diagonal are ignored.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (r, row) in rows.iter().enumerate() {
            m.row_mut(r).copy_from_slice(&row[..=r]);
        }
        m
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entries `0..=r` of row `r` (0-based).
    pub fn row(&self, r: usize) -> &[f64] {
        let start = r * (r + 1) / 2;
        &self.data[start..=start + r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        let start = r * (r + 1) / 2;
        &mut self.data[start..=start + r]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        if c > r {
            0.0
        } else {
            self.row(r)[c]
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearBackend {
    /// Forward substitution, O(N²).
    #[default]
    TriangularSubstitution,
    /// Gauss–Jordan inversion with partial pivoting, then a product, O(N³).
    GaussJordan,
}

/// Solves `J·Δ = F`.
pub fn solve_linear(
    jacobian: &LowerTriangular,
    rhs: &[f64],
    backend: LinearBackend,
    singular_tolerance: f64,
) -> Result<Vec<f64>> {
    if rhs.len() != jacobian.size() {
        return Err(Error::LengthMismatch {
            expected: jacobian.size(),
            found: rhs.len(),
        });
    }
    match backend {
        LinearBackend::TriangularSubstitution => forward_substitution(jacobian, rhs, singular_tolerance),
        LinearBackend::GaussJordan => {
            let inverse = gauss_jordan_inverse(jacobian, singular_tolerance)?;
            let n = rhs.len();
            Ok((0..n)
                .map(|r| inverse[r * n..(r + 1) * n].iter().zip(rhs).map(|(a, b)| a * b).sum())
                .collect())
        }
    }
}

fn forward_substitution(j: &LowerTriangular, rhs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut x = Vec::with_capacity(rhs.len());
    for (r, &b) in rhs.iter().enumerate() {
        let row = j.row(r);
        let diag = row[r];
        if !(diag.abs() >= tol) {
            return Err(Error::SingularJacobian {
                row: r + 1,
                magnitude: diag.abs(),
            });
        }
        let acc: f64 = row[..r].iter().zip(&x).map(|(a, b)| a * b).sum();
        x.push((b - acc) / diag);
    }
    Ok(x)
}

/// Dense row-major inverse of `j` by Gauss–Jordan elimination.
fn gauss_jordan_inverse(j: &LowerTriangular, tol: f64) -> Result<Vec<f64>> {
    let n = j.size();
    let width = 2 * n;
    let mut aug = vec![0.0; n * width];
    for r in 0..n {
        aug[r * width..r * width + r + 1].copy_from_slice(j.row(r));
        aug[r * width + n + r] = 1.0;
    }
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| aug[a * width + col].abs().total_cmp(&aug[b * width + col].abs()))
            .unwrap_or(col);
        let pivot = aug[pivot_row * width + col];
        if !(pivot.abs() >= tol) {
            return Err(Error::SingularJacobian {
                row: col + 1,
                magnitude: pivot.abs(),
            });
        }
        if pivot_row != col {
            for c in 0..width {
                aug.swap(pivot_row * width + c, col * width + c);
            }
        }
        let inv = 1.0 / pivot;
        for c in 0..width {
            aug[col * width + c] *= inv;
        }
        let pivot_vals: Vec<f64> = aug[col * width..(col + 1) * width].to_vec();
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = aug[r * width + col];
            if factor != 0.0 {
                let row = &mut aug[r * width..(r + 1) * width];
                for (x, p) in row.iter_mut().zip(&pivot_vals) {
                    *x -= factor * p;
                }
            }
        }
    }
    let mut inverse = Vec::with_capacity(n * n);
    for r in 0..n {
        inverse.extend_from_slice(&aug[r * width + n..(r + 1) * width]);
    }
    Ok(inverse)
}

/// Starting vector `U_0`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    /// One scalar Newton step per node, marching forward from `u0`.
    #[default]
    Predictor,
    /// Every entry equal to `u0`.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    pub eps: f64,
    pub max_iterations: usize,
    /// Value of the step norm before the first iteration.
    pub initial_residual: f64,
    pub linear_backend: LinearBackend,
    pub singular_tolerance: f64,
    pub initial_guess: InitialGuess,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        Self::with_eps(1e-4)
    }
}

impl NewtonSettings {
    pub fn with_eps(eps: f64) -> Self {
        NewtonSettings {
            eps,
            max_iterations: 100,
            initial_residual: 1e3 * eps,
            linear_backend: LinearBackend::TriangularSubstitution,
            singular_tolerance: 1e-14,
            initial_guess: InitialGuess::Predictor,
        }
    }

    pub fn backend(mut self, backend: LinearBackend) -> Self {
        self.linear_backend = backend;
        self
    }

    pub fn initial_guess(mut self, guess: InitialGuess) -> Self {
        self.initial_guess = guess;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidProblem(format!(
                "Newton settings need eps > 0 and max_iterations >= 1 (got {}, {})",
                self.eps, self.max_iterations
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub solution: SolutionSeries,
    pub iterations: usize,
    pub converged: bool,
    /// `‖U_{m+1} − U_m‖_∞` of the last iteration.
    pub last_step_norm: f64,
}

fn predictor(disc: &Discretization, tol: f64) -> Vec<f64> {
    let n = disc.nodes();
    let mut u = vec![0.0; n];
    let mut prev = disc.u0();
    for k in 1..=n {
        let c = disc.coeffs(k);
        let f = disc.history(&u, k) + c.a * prev * prev + c.b * prev + c.c;
        let df = disc.weights().row(k)[0] + 2.0 * c.a * prev + c.b;
        let x = if df.abs() >= tol { prev - f / df } else { prev };
        u[k - 1] = x;
        prev = x;
    }
    u
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs the Newton iteration and reports the outcome without treating an
/// exhausted iteration budget as an error.
pub fn iterate(problem: &Problem, settings: &NewtonSettings) -> Result<NewtonOutcome> {
    settings.validate()?;
    let disc = Discretization::new(problem)?;
    let mut u = match settings.initial_guess {
        InitialGuess::Constant => vec![problem.u0; disc.nodes()],
        InitialGuess::Predictor => predictor(&disc, settings.singular_tolerance),
    };

    let mut step_norm = settings.initial_residual;
    let mut iterations = 0;
    while step_norm > settings.eps && iterations < settings.max_iterations {
        let f = disc.residual_vector(&u);
        let j = disc.jacobian(&u);
        let delta = solve_linear(&j, &f, settings.linear_backend, settings.singular_tolerance)?;
        for (x, d) in u.iter_mut().zip(&delta) {
            *x -= d;
        }
        step_norm = max_abs(&delta);
        iterations += 1;
        if !step_norm.is_finite() {
            break;
        }
    }

    let converged = step_norm <= settings.eps;
    let final_residual_norm = max_abs(&disc.residual_vector(&u));
    Ok(NewtonOutcome {
        solution: SolutionSeries {
            times: problem.grid.times(),
            values: u,
            newton_iterations: iterations,
            final_residual_norm,
        },
        iterations,
        converged,
        last_step_norm: step_norm,
    })
}

/// Solves the discrete problem; fails with [`Error::NonConvergence`] when the
/// step norm does not drop below `eps` within the iteration budget.
pub fn solve(problem: &Problem, settings: &NewtonSettings) -> Result<NewtonOutcome> {
    let outcome = iterate(problem, settings)?;
    if !outcome.converged {
        return Err(Error::NonConvergence {
            iterations: outcome.iterations,
            last_step_norm: outcome.last_step_norm,
        });
    }
    Ok(outcome)
}
