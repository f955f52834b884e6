//! Verification suites, experiments and configuration behind the `homsob` binary.

pub mod config;
pub mod experiments;
pub mod report;
pub mod suites;

use config::{RunConfig, Suite};
use report::Report;

/// Runs `suite` and returns the ordered report.
pub fn verify(suite: Suite, cfg: &RunConfig) -> Report {
    let mut report = Report::default();
    report.extend(suites::run_suite(suite, cfg));
    report.sort();
    report
}
