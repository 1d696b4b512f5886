//! Metrics for human-AI decision-making computed from interaction traces.
//!
//! A trace is a sequence of [`DecisionRecord`]s carrying the ground truth, the
//! human's initial decision, the AI prediction and the final decision. The
//! metric modules turn a validated [`Trace`] into exact counts:
//!
//! - [`outcome`]: accuracies, team gain, oracle and regret
//! - [`reliance`]: conditional acceptance, decision changes, latency and
//!   local-versus-global updating
//! - [`safety`]: help/harm decomposition and governance rates
//! - [`learning`]: calibration, slope trajectories, retention, transfer and
//!   time-to-calibration
//!
//! [`report`] assembles all of them per partition, and [`simulator`] produces
//! synthetic traces with known expectations.

use thiserror::Error;

pub mod cli;
pub mod fixtures;
pub mod ingest;
pub mod learning;
pub mod outcome;
pub mod ratio;
pub mod reliance;
pub mod report;
pub mod safety;
pub mod simulator;
pub mod trace;

pub use ratio::{Ratio, SignedRatio};
pub use trace::{
    partition, split_blocks, validate_trace, BlockScheme, DecisionRecord, PartitionId,
    PartitionKey, Trace,
};

/// A tunable parameter outside its admissible range.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid parameter '{name}': {reason}")]
pub struct InvalidParameter {
    pub name: &'static str,
    pub reason: String,
}

impl InvalidParameter {
    pub fn new(name: &'static str, reason: impl Into<String>) -> Self {
        InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
