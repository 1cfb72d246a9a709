//! Release planning that weighs the satisfaction gained from delivering a
//! feature against the dissatisfaction caused by leaving it out.
//!
//! * [`valuation`] turns stakeholder input (one-point scores, pairwise
//!   comparisons, Kano questionnaires) into per-feature `(S, DS)` values.
//! * [`planning`] holds instances, plan evaluation and dominance.
//! * [`solver`] maximizes the weighted objective exactly; [`sweep`] varies
//!   the weight to trace the trade-off front.
//! * [`baselines`] and [`analysis`] support comparisons against simple
//!   heuristics and manual plans.
//! * [`dataio`] loads and validates datasets; [`pipeline`] wires the pieces
//!   together for the command line and HTTP front ends.

pub mod analysis;
pub mod error;
pub mod dataio;
pub mod fixtures;
pub mod model;
pub mod baselines;
pub mod pipeline;
pub mod planning;
pub mod solver;
pub mod sweep;
#[cfg(test)]
mod testutil;
pub mod valuation;

pub use error::{ArpError, Diagnostic, Result};
pub use model::{
    Feature, Objectives, ParetoEntry, ParetoResult, Plan, ReleaseConfig, StabilityInterval, Stakeholder,
    FEASIBILITY_TOLERANCE, OBJECTIVE_TOLERANCE,
};
pub use planning::ArpInstance;
