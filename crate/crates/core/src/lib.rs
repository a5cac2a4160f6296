//! Numerical toolkit for approximate rotation relations among unitary matrices.
//!
//! * [`linalg`]: eigendecompositions of normal matrices and functional calculus.
//! * [`reps`]: exact clock/shift representations, canonical trace, non-degeneracy.
//! * [`obstruction`]: branch logarithms, Rieffel and Bott elements, trace formula, reports.
//! * [`search`]: Riemannian repair on products of unitary groups, planted instances,
//!   spin-triple counterexample and its index certificate.
//! * [`experiments`]: batch drivers shared by the CLI and the acceptance suite.

pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod matrix_io;
pub mod obstruction;
pub mod phase;
pub mod reps;
pub mod search;
pub mod tuple;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use phase::{PhaseMatrix, RationalPhase};
pub use tuple::UnitaryTuple;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
