//! Configuration, reports and figures for the neutral DDE solvers.

pub mod config;
pub mod error;
pub mod plot;
pub mod report;

pub use config::ProblemConfig;
pub use error::{HarnessError, Result};
