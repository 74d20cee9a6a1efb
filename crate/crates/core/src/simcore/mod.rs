//! Slot-level Monte Carlo simulator of the SPS MAC.
//!
//! Periods of `1/tau` seconds are aligned across vehicles. In each period every
//! vehicle transmits once on its reserved RBG; the previous period is its
//! sensing window and the next one its selection window.

mod batch;
mod engine;
mod grid;
mod reception;
mod scenario;
mod trial;

pub use batch::{Execution, TrialBatch};
pub use engine::{advance, run_period, transmit, PeriodStats, SimOptions};
pub use grid::{Cell, ResourceGrid, SensingRecord};
pub use reception::{detect_receptions, Outcome, Reception, ReceptionTally};
pub use scenario::{build_scenario, Population, Scenario, VehicleState};
pub use trial::{periods_in, run_trial, PairCounts, TrialResult, STARVATION_FLAG_RATE};

use crate::analytic::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("duration {duration_s} s must be at least the warmup {warmup_s} s, which must be non-negative")]
    InvalidDuration { duration_s: f64, warmup_s: f64 },
    #[error("could not start worker pool: {0}")]
    ThreadPool(String),
}
