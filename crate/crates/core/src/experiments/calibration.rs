//! Empirical gap calibration for the Rieffel element: how large a defect
//! still leaves ‖e² − e‖ below 1/4.
//!
//! A single perturbation direction is drawn per generator and scaled along a
//! noise grid, so successive rows differ only in size.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{c64, exp_skew, op_norm, phase};
use crate::obstruction::{rieffel_element, RieffelParams};
use crate::phase::RationalPhase;
use crate::reps::rational_pair_rep;
use crate::search::random::{haar_unitary, random_skew, rng_for};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub theta: RationalPhase,
    pub multiplicity: usize,
    /// Operator norm of each generator's perturbation exponent.
    pub noise_grid: Vec<f64>,
    pub seed: u64,
}

impl CalibrationConfig {
    pub fn new(theta: RationalPhase, multiplicity: usize, seed: u64) -> Self {
        let mut noise_grid = vec![1.5, 1.2, 1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.2, 0.15, 0.1, 0.05];
        noise_grid.extend((2..=10).map(|k| 10f64.powi(-k)));
        Self {
            theta,
            multiplicity,
            noise_grid,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationRow {
    pub noise: f64,
    pub defect: f64,
    pub idempotency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationTable {
    pub theta: f64,
    pub epsilon: f64,
    pub multiplicity: usize,
    /// Sorted by decreasing noise.
    pub rows: Vec<CalibrationRow>,
    /// Largest sampled defect d with ‖e² − e‖ < 1/4 at every sample of defect ≤ d.
    pub threshold: Option<f64>,
}

pub const QUARTER: f64 = 0.25;

pub fn gap_calibration(cfg: &CalibrationConfig, tol: &Tolerances) -> Result<CalibrationTable> {
    if cfg.theta.p() == 0 {
        return Err(Error::ParamViolation("calibration needs θ ≠ 0".into()));
    }
    if cfg.noise_grid.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::ParamViolation(
            "noise grid entries must be finite and ≥ 0".into(),
        ));
    }
    let exact = rational_pair_rep(cfg.theta, cfg.multiplicity);
    let dim = exact.dim();
    let mut rng = rng_for(cfg.seed, 0);
    let w = haar_unitary(dim, &mut rng);
    let base = exact.conjugated(&w);
    let dirs = [
        random_skew(dim, 1.0, &mut rng),
        random_skew(dim, 1.0, &mut rng),
    ];
    let t = cfg.theta.value();
    let params = RieffelParams::with_default_epsilon(t)?;

    let mut grid = cfg.noise_grid.clone();
    grid.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::with_capacity(grid.len());
    for noise in grid {
        let v = base.get(0) * exp_skew(&(&dirs[0] * c64(noise, 0.0)), tol)?;
        let u = base.get(1) * exp_skew(&(&dirs[1] * c64(noise, 0.0)), tol)?;
        let defect = op_norm(&(&u * &v - &v * &u * phase(t)));
        let e = rieffel_element(&u, &v, params, tol)?;
        let idempotency = op_norm(&(&e * &e - &e));
        rows.push(CalibrationRow {
            noise,
            defect,
            idempotency,
        });
    }

    let mut by_defect: Vec<&CalibrationRow> = rows.iter().collect();
    by_defect.sort_by(|a, b| a.defect.total_cmp(&b.defect));
    let threshold = by_defect
        .iter()
        .take_while(|r| r.idempotency < QUARTER)
        .last()
        .map(|r| r.defect);
    Ok(CalibrationTable {
        theta: t,
        epsilon: params.epsilon(),
        multiplicity: cfg.multiplicity,
        rows,
        threshold,
    })
}

impl CalibrationTable {
    /// ‖e² − e‖ never grows (beyond `slack`, relative, plus a 1e-13 floor) as
    /// the noise shrinks, over rows with defect at most `threshold`.
    pub fn monotone_below_threshold(&self, slack: f64) -> bool {
        let Some(th) = self.threshold else {
            return false;
        };
        let below: Vec<&CalibrationRow> = self.rows.iter().filter(|r| r.defect <= th).collect();
        below
            .windows(2)
            .all(|w| w[1].idempotency <= w[0].idempotency * (1.0 + slack) + 1e-13)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_has_a_threshold_and_shrinks() {
        let cfg = CalibrationConfig::new(RationalPhase::new(1, 3).unwrap(), 2, 7);
        let table = gap_calibration(&cfg, &Tolerances::default()).unwrap();
        let th = table.threshold.unwrap();
        assert!(th > 1e-3, "{table:?}");
        assert!(table.monotone_below_threshold(1e-6), "{table:?}");
        let last = table.rows.last().unwrap();
        assert!(last.idempotency < 1e-8);
    }

    #[test]
    fn zero_phase_refused() {
        let cfg = CalibrationConfig::new(RationalPhase::zero(), 1, 0);
        assert!(gap_calibration(&cfg, &Tolerances::default()).is_err());
    }
}
