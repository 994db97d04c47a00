//! Command-line front end: dataset I/O, boxplot figures and simulation
//! reports on top of `fbox_core`.

// Negated comparisons double as NaN rejection in argument checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod format;
pub mod io;
pub mod report;
pub mod svg;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
