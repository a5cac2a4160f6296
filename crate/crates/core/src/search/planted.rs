use crate::error::Result;
use crate::linalg::exp_skew;
use crate::obstruction::defect;
use crate::phase::PhaseMatrix;
use crate::reps::rational_rep;
use crate::search::random::{haar_unitary, random_skew, rng_for};
use crate::tuple::UnitaryTuple;
use crate::Tolerances;

#[derive(Clone, Debug)]
pub struct PlantedInstance {
    pub tuple: UnitaryTuple,
    pub ground_truth: UnitaryTuple,
    /// Measured defect of `tuple`.
    pub defect: f64,
}

/// Haar-conjugated exact representation with each member multiplied by e^{X_j},
/// X_j skew-Hermitian of operator norm `noise`.
pub fn plant_instance(
    theta: &PhaseMatrix,
    multiplicity: usize,
    noise: f64,
    seed: u64,
) -> Result<PlantedInstance> {
    plant_instance_stream(theta, multiplicity, noise, seed, 0)
}

/// Same as [`plant_instance`], drawing from the RNG stream `stream` of `seed`.
pub fn plant_instance_stream(
    theta: &PhaseMatrix,
    multiplicity: usize,
    noise: f64,
    seed: u64,
    stream: u64,
) -> Result<PlantedInstance> {
    let exact = rational_rep(theta, multiplicity)?;
    let mut rng = rng_for(seed, stream);
    let w = haar_unitary(exact.dim(), &mut rng);
    let ground_truth = exact.conjugated(&w);
    let tol = Tolerances::default();
    let mut mats = Vec::with_capacity(ground_truth.len());
    for v in ground_truth.matrices() {
        let x = random_skew(v.nrows(), noise, &mut rng);
        mats.push(if noise == 0.0 {
            v.clone()
        } else {
            v * exp_skew(&x, &tol)?
        });
    }
    let tuple = UnitaryTuple::from_matrices(mats)?;
    let defect = defect(theta, &tuple)?.max;
    Ok(PlantedInstance {
        tuple,
        ground_truth,
        defect,
    })
}
