//! Traffic replay for the commenting scheme.
//!
//! A dataset of `(t, u, m)` rows is first precomputed: users are enrolled on
//! their first row and every row is signed and encrypted for the ledger,
//! with each step timed. The replay then appends the entries to a ledger,
//! verifies them on a worker pool and schedules the measured service times
//! first-come-first-serve in virtual time to obtain latencies.

pub mod dataset;
pub mod precompute;
pub mod report;
pub mod sched;
pub mod sim;

use thiserror::Error;

use tt_core::scheme::{JoinError, SchemeError};

pub use dataset::{gen_synthetic, load_dataset, parse_dataset, write_jsonl, DatasetError, Format, TrafficEvent};
pub use precompute::{precompute, Deployment, JobKind, Prepared, PrecomputeConfig, PreparedJob};
pub use report::{cost_report, CostModel, Dollars, Outcomes, SimReport, Stats};
pub use sched::{estimate_cores, fcfs};
pub use sim::{sample_service_time, simulate, JobOutcome, Outcome, SimLedger, SimRun};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("ledger: {0}")]
    Ledger(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Join(#[from] JoinError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// Bad input rather than a failure while running.
    pub fn is_validation(&self) -> bool {
        matches!(self, HarnessError::Dataset(_) | HarnessError::Config(_))
    }
}
