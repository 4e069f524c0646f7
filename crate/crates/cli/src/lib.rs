//! Scenario runner, reports and acceptance battery for `seqcorr`.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;
pub mod suite;
pub mod tolerance;

pub use error::{CliError, CliResult};
pub use report::{Check, Report};
pub use run::{dump_instrument, run_scenario, validate_scenario, RunOptions};
pub use suite::run_suite;
pub use tolerance::{CheckTolerances, ToleranceProfile};
