//! Constructive repair of almost rotation-commuting tuples, planted instances
//! with known ground truth, and the spin-triple counterexample.

pub mod objective;
pub mod planted;
pub mod random;
pub mod repair;
pub mod spin;

pub use objective::{objective, riemannian_gradient, Objective};
pub use planted::{plant_instance, PlantedInstance};
pub use repair::{repair, SearchConfig, SearchResult};
pub use spin::{
    bott_index_triple, unitaries_from_selfadjoint, voiculescu_triple, TripleCertificate,
};
