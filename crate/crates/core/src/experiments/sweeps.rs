use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::obstruction::{obstruction_report, Verdict};
use crate::phase::{PhaseMatrix, RationalPhase};
use crate::reps::rational_pair_rep;
use crate::search::planted::plant_instance_stream;
use crate::search::repair::{repair_outcome, SearchConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlantedTrial {
    pub trial: usize,
    pub initial_defect: f64,
    pub converged: bool,
    pub final_defect: f64,
    pub distance_moved: f64,
    pub iterations: usize,
}

/// Repairs `trials` planted instances; trial t draws from stream t of `seed`.
pub fn planted_sweep(
    theta: &PhaseMatrix,
    multiplicity: usize,
    noise: f64,
    trials: usize,
    seed: u64,
    cfg: &SearchConfig,
) -> Result<Vec<PlantedTrial>> {
    let pool = super::thread_pool()?;
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let inst = plant_instance_stream(theta, multiplicity, noise, seed, t as u64)?;
                let res = repair_outcome(theta, &inst.tuple, cfg)?;
                Ok(PlantedTrial {
                    trial: t,
                    initial_defect: inst.defect,
                    converged: res.converged,
                    final_defect: res.final_defect,
                    distance_moved: res.distance_moved,
                    iterations: res.iterations,
                })
            })
            .collect()
    })
}

/// (shift(q), clock(q)) measured against Θ = 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructedRow {
    pub q: u64,
    pub defect: f64,
    pub trace_condition_residual: Option<f64>,
    pub bott_index: Option<i64>,
    pub verdict: Verdict,
    pub repair_converged: bool,
    pub repair_distance: f64,
    pub repair_final_defect: f64,
}

pub fn obstructed_family(
    q_values: &[u64],
    n_monomial: u32,
    delta_cert: f64,
    cfg: &SearchConfig,
    tol: &Tolerances,
) -> Result<Vec<ObstructedRow>> {
    let zero = PhaseMatrix::zero(2)?;
    let pool = super::thread_pool()?;
    pool.install(|| {
        q_values
            .par_iter()
            .map(|&q| {
                if q < 2 {
                    return Err(Error::ParamViolation(format!("q = {q} must be ≥ 2")));
                }
                let tuple = rational_pair_rep(RationalPhase::new(1, q)?, 1);
                let report = obstruction_report(&zero, &tuple, n_monomial, delta_cert, tol)?;
                let pair = &report.per_pair[0];
                let res = repair_outcome(&zero, &tuple, cfg)?;
                Ok(ObstructedRow {
                    q,
                    defect: report.defect_max,
                    trace_condition_residual: pair.trace_condition_residual,
                    bott_index: pair.bott_index,
                    verdict: report.verdict,
                    repair_converged: res.converged,
                    repair_distance: res.distance_moved,
                    repair_final_defect: res.final_defect,
                })
            })
            .collect()
    })
}
