//! Experiment configuration, report records and the verification suites.

pub mod config;
pub mod report;
pub mod rng;
pub mod suites;

pub use config::{ExperimentConfig, ReportFormat};
pub use report::{failures, ReportRecord, Rel};
pub use suites::{run_suite, SUITES};

/// Enumeration budget from `SEQCOMPLEX_BUDGET`, if set.
pub fn budget_override() -> Option<u64> {
    std::env::var("SEQCOMPLEX_BUDGET").ok()?.trim().parse().ok()
}
