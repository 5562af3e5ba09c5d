//! Error types for each layer of the library.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("scenario needs {distance:.3} m of travel but at most {reach:.3} m is reachable")]
    InfeasibleScenario { distance: f64, reach: f64 },
    #[error("length mismatch: expected {expected} slots, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("slot {slot} moves {step:.6} m, above the per-slot limit {limit:.6} m")]
    SpeedLimit { slot: usize, step: f64, limit: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("malformed program: {0}")]
    InvalidProgram(String),
    #[error("start point is not strictly feasible: constraint {index} evaluates to {value:e}")]
    NotStrictlyFeasible { index: usize, value: f64 },
    #[error("no strictly feasible point exists (best slack {slack:e})")]
    Infeasible { slack: f64 },
    #[error("iteration limit reached before {0}")]
    IterationLimit(&'static str),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(
        "no starting flight fits the energy budget; the least demanding one violates slot {slot} \
         (margin {margin:.3} J); raise the initial energy to at least {required:.3} J"
    )]
    InfeasibleInitial { slot: usize, margin: f64, required: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{scheme} needs {required:.4} m/s, above the speed limit {limit:.4} m/s")]
    SpeedExceeded {
        scheme: &'static str,
        required: f64,
        limit: f64,
    },
    #[error("{0}")]
    Invalid(String),
}
