//! Batch drivers shared by the command-line tool and the acceptance suite.
//!
//! Sweeps fan out over rayon, each cell seeded from `(seed, cell index)` so a
//! parallel run reproduces a serial one bit for bit. Results are collected in
//! index order before anything is written.

pub mod calibration;
pub mod counterexample;
pub mod exel_suite;
pub mod schema;
pub mod sweeps;

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub use calibration::{gap_calibration, CalibrationConfig, CalibrationRow, CalibrationTable};
pub use counterexample::{counterexample_sweep, CounterexampleRow};
pub use exel_suite::{evaluate_exel_case, exel_suite, ExelCase, ExelSuiteConfig, ExelSuiteSummary};
pub use sweeps::{obstructed_family, planted_sweep, ObstructedRow, PlantedTrial};

pub const THREADS_ENV: &str = "ROTLAB_THREADS";

/// Thread pool capped by `ROTLAB_THREADS` when set.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().map_err(|_| {
            Error::InvalidConfig(format!("{THREADS_ENV}={raw:?} is not a positive integer"))
        })?;
        if n == 0 {
            return Err(Error::InvalidConfig(format!(
                "{THREADS_ENV} must be at least 1"
            )));
        }
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))
}

/// Volatile run metadata, kept apart from the deterministic payload.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    pub tolerances: Tolerances,
}

impl Meta {
    pub fn new(tolerances: Tolerances, timestamp: impl Into<String>) -> Self {
        Self {
            tool: "rotlab",
            version: crate::VERSION,
            timestamp: timestamp.into(),
            tolerances,
        }
    }
}

/// `{"meta": …, "report": …}`
pub fn with_meta<T: Serialize>(meta: &Meta, report: &T) -> Result<serde_json::Value> {
    let report = serde_json::to_value(report).map_err(|e| Error::Parse(e.to_string()))?;
    let meta = serde_json::to_value(meta).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(serde_json::json!({ "meta": meta, "report": report }))
}

/// Whether an error only says a spectral gap precondition failed.
pub(crate) fn is_gap_failure(err: &Error) -> bool {
    matches!(
        err,
        Error::GapViolation { .. }
            | Error::GapAtHalfViolation { .. }
            | Error::NoGap
            | Error::NoSpectralGap(_)
    )
}
