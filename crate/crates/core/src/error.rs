use thiserror::Error;

use crate::order::OperatorKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {function}: argument {argument} is outside the supported domain")]
    Domain {
        function: &'static str,
        argument: f64,
    },

    #[error("invalid order function: {0}")]
    InvalidOrder(String),

    #[error("order {value} at argument {argument} is outside (0, 1)")]
    OrderOutOfRange { argument: f64, value: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("Jacobian is singular: |pivot| = {magnitude:e} in row {row}")]
    SingularJacobian { row: usize, magnitude: f64 },

    #[error("Newton iteration did not converge in {iterations} iterations (last step norm {last_step_norm:e})")]
    NonConvergence {
        iterations: usize,
        last_step_norm: f64,
    },

    #[error("scalar Newton iteration did not converge at node {node}")]
    ScalarNonConvergence { node: usize },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid refinement schedule: {0}")]
    InvalidSchedule(String),

    #[error("study level N={nodes} ({kind}): {source}")]
    Study {
        nodes: usize,
        kind: OperatorKind,
        #[source]
        source: Box<Error>,
    },
}
