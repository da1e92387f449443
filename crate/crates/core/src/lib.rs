//! Finite-difference solver for the Cauchy problem of the fractional Riccati
//! equation with variable-order Gerasimov–Caputo memory operators.
//!
//! The hereditary equation
//!
//! ```text
//! D^{ord} u(t) + a(t) u(t)^2 + b(t) u(t) + c(t) = 0,   u(0) = u0,
//! ```
//!
//! is solved for two flavours of the memory operator: one whose order
//! depends on the current time, `α(t)`, and one whose order depends on the
//! lag `γ(t − τ)`. The operator is discretized with L1-type weights, the
//! resulting lower-triangular nonlinear system is solved by Newton–Raphson,
//! and accuracy is assessed a posteriori with the Runge rule on a sequence of
//! refined grids.
//!
//! Module map:
//! - [`special`]: Euler gamma function.
//! - [`order`]: variable-order functions and their validation.
//! - [`problem`]: grids, coefficients, problem definition, memory kernels.
//! - [`discretization`]: quadrature weights, residual and Jacobian.
//! - [`newton`]: the global Newton iteration and its linear backends.
//! - [`oracle`]: independent reference solutions (RK4, sequential marching).
//! - [`convergence`]: Runge error, observed order and refinement studies.
//! - [`presets`]: the named experiment configurations.
//! - [`cli`]: configuration parsing and file output for the binary.

pub mod cli;
pub mod convergence;
pub mod discretization;
mod error;
pub mod newton;
pub mod oracle;
pub mod order;
pub mod presets;
pub mod problem;
pub mod special;

pub use error::{Error, Result};
