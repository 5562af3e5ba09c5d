//! Trajectory, jamming and energy optimization for a UAV that monitors a
//! suspicious ground link.
//!
//! The UAV eavesdrops on a source S transmitting to a destination D and may
//! jam D so that its own received SNR is at least D's SINR in every slot.
//! Two pipelines are provided:
//!
//! - [`jamming_opt`]: minimize the total jamming energy by alternating
//!   convex solves over the trajectory and per-slot jamming power, with
//!   NLoS, non-outage and two-link variants.
//! - [`energy_opt`]: minimize jamming plus propulsion energy for a
//!   solar-powered rotary-wing UAV by successive convex approximation,
//!   subject to energy-harvesting causality.
//!
//! [`baselines`] generates the reference flight schemes these are compared
//! against, and [`convex`] is the log-barrier interior-point solver both
//! pipelines are built on.

// Negated comparisons deliberately reject NaN; banded index loops read
// closer to the matrix formulas than iterator chains.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod convex;
pub mod energy_opt;
pub mod error;
pub mod jamming_opt;
pub mod model;

pub use error::{BaselineError, ModelError, OptError, SolverError};
