//! Batch driver for the spincat engines: JSON run configurations, single
//! runs with per-sample integrity checks, parameter sweeps on a bounded
//! worker pool, π-pulse timing optimisation and figure data recipes.
//!
//! Every run produces a [`record::RunRecord`]; engine failures are captured
//! in the record rather than propagated, so sweeps never abort on one bad
//! point.

pub mod config;
pub mod figures;
pub mod peak;
pub mod period;
pub mod pulse;
pub mod record;
pub mod run;
pub mod sweep;

pub use config::{Engine, PulseSchedule, RunConfig};
pub use record::RunRecord;

#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] spincat_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ExpError>;
