//! Obstruction invariants of almost rotation-commuting unitaries.
//!
//! Pair convention: for a pair (u, v) with uv ≈ e^{2πiθ}vu the trace formula
//! compares τ(R^θ(u, v)) with (1/2πi)τ(log_θ(uvu*v*)). Inside a tuple the pair
//! (j, k), j < k, is read as u = v_k, v = v_j.

pub mod bott;
pub mod branch;
pub mod exel;
pub mod report;
pub mod rieffel;

pub use bott::{bott_element_theta0, BottElement};
pub use branch::{common_gap_for_phases, common_gap_theta, log_branch, BranchAngle, CommonGap};
pub use exel::{exel_lhs, exel_rhs, group_commutator};
pub use report::{
    defect, obstruction_report, DefectBreakdown, ObstructionReport, PairReport, Verdict,
};
pub use rieffel::{
    rieffel_element, rieffel_projection, RieffelFunctions, RieffelParams, RieffelProjection,
};
