//! Seeded verification suites, run configuration and report output.

mod config;
mod report;
mod suites;

pub use config::{Hooks, RunConfig, Samples, DEFAULT_TOLERANCES};
pub use report::{CheckReport, RunOutput, Table};
pub use suites::{calibration_from, run_suite, Context, Suite};
