//! Numerical verification of the holoherm library: five suites of checks,
//! each producing a JSON report with per-case residuals.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, SuiteConfig};
pub use report::{exit_code, write_reports, CheckReport, Comparison, Format, VerificationReport};
pub use suites::{run_all, Suite};
