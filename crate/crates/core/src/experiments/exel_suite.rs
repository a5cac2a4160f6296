//! Randomized check of the trace formula on perturbed clock/shift pairs:
//! rank(R^θ(u, v))/N against (1/2πi)·τ(log_θ(uvu*v*)).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{exp_skew, op_norm, phase, CMatrix};
use crate::obstruction::{exel_lhs, exel_rhs, BranchAngle, RieffelParams};
use crate::phase::RationalPhase;
use crate::reps::rational_pair_rep;
use crate::search::random::{haar_unitary, random_skew, rng_for};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExelSuiteConfig {
    pub q_min: u64,
    pub q_max: u64,
    pub max_multiplicity: usize,
    /// Noise is log-uniform in [noise_min, noise_max].
    pub noise_min: f64,
    pub noise_max: f64,
    /// Every `zero_noise_every`-th case is exact (0 disables).
    pub zero_noise_every: usize,
    /// Stop once this many cases passed the gap preconditions.
    pub target_cases: usize,
    pub max_attempts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ExelSuiteConfig {
    fn default() -> Self {
        Self {
            q_min: 2,
            q_max: 12,
            max_multiplicity: 4,
            noise_min: 1e-6,
            noise_max: 1e-2,
            zero_noise_every: 10,
            target_cases: 200,
            max_attempts: 2000,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl ExelSuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.q_min < 2 || self.q_max < self.q_min {
            return bad(format!(
                "need 2 ≤ q_min ≤ q_max, got {}..{}",
                self.q_min, self.q_max
            ));
        }
        if self.max_multiplicity == 0 {
            return bad("max_multiplicity must be ≥ 1".into());
        }
        if !(self.noise_min > 0.0 && self.noise_max >= self.noise_min && self.noise_max.is_finite())
        {
            return bad(format!(
                "invalid noise range [{}, {}]",
                self.noise_min, self.noise_max
            ));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExelCase {
    pub index: usize,
    pub p: u64,
    pub q: u64,
    pub multiplicity: usize,
    pub dim: usize,
    pub noise: f64,
    pub defect: f64,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub abs_diff: Option<f64>,
    /// |N·rhs − round(N·rhs)|
    pub quantization_residue: Option<f64>,
    pub status: CaseStatus,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExelSuiteSummary {
    pub config: ExelSuiteConfig,
    pub attempted: usize,
    pub validated: usize,
    pub skipped: usize,
    pub failed: usize,
    pub max_abs_diff: f64,
    pub max_quantization_residue: f64,
    pub passed: bool,
    pub cases: Vec<ExelCase>,
}

/// `(lhs, rhs, status, note)` for one case.
pub type CaseEvaluation = (Option<f64>, Option<f64>, CaseStatus, Option<String>);

/// Both sides of the formula for a pair with uv ≈ e^{2πiθ}vu. Gap failures come
/// back as `Skipped`.
pub fn evaluate_exel_case(
    u: &CMatrix,
    v: &CMatrix,
    theta: RationalPhase,
    tolerance: f64,
    tol: &Tolerances,
) -> Result<CaseEvaluation> {
    let t = theta.value();
    let rhs = match exel_rhs(u, v, BranchAngle::new(t)?, tol) {
        Ok(x) => x,
        Err(e) if super::is_gap_failure(&e) => {
            return Ok((None, None, CaseStatus::Skipped, Some(e.to_string())))
        }
        Err(e) => return Err(e),
    };
    let lhs = match exel_lhs(u, v, RieffelParams::with_default_epsilon(t)?, tol) {
        Ok(x) => x,
        Err(e) if super::is_gap_failure(&e) => {
            return Ok((None, Some(rhs), CaseStatus::Skipped, Some(e.to_string())))
        }
        Err(e) => return Err(e),
    };
    let n = u.nrows() as f64;
    let residue = (n * rhs - (n * rhs).round()).abs();
    let status = if (lhs - rhs).abs() <= tolerance && residue <= tolerance {
        CaseStatus::Passed
    } else {
        CaseStatus::Failed
    };
    Ok((Some(lhs), Some(rhs), status, None))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn run_case(cfg: &ExelSuiteConfig, index: usize, tol: &Tolerances) -> Result<ExelCase> {
    let mut rng = rng_for(cfg.seed, index as u64);
    let q = rng.random_range(cfg.q_min..=cfg.q_max);
    let coprime: Vec<u64> = (1..q).filter(|&p| gcd(p, q) == 1).collect();
    let p = coprime[rng.random_range(0..coprime.len())];
    let multiplicity = rng.random_range(1..=cfg.max_multiplicity);
    let noise = if cfg.zero_noise_every > 0 && index.is_multiple_of(cfg.zero_noise_every) {
        0.0
    } else {
        let (lo, hi) = (cfg.noise_min.ln(), cfg.noise_max.ln());
        (lo + (hi - lo) * rng.random::<f64>()).exp()
    };
    let theta = RationalPhase::new(p as i64, q)?;
    let exact = rational_pair_rep(theta, multiplicity);
    let dim = exact.dim();
    let w = haar_unitary(dim, &mut rng);
    let conj = exact.conjugated(&w);
    let mut mats = Vec::with_capacity(2);
    for m in conj.matrices() {
        let x = random_skew(dim, noise, &mut rng);
        mats.push(if noise == 0.0 {
            m.clone()
        } else {
            m * exp_skew(&x, tol)?
        });
    }
    let (v, u) = (&mats[0], &mats[1]);
    let defect = op_norm(&(u * v - v * u * phase(theta.value())));
    let (lhs, rhs, status, reason) = evaluate_exel_case(u, v, theta, cfg.tolerance, tol)?;
    Ok(ExelCase {
        index,
        p,
        q,
        multiplicity,
        dim,
        noise,
        defect,
        lhs,
        rhs,
        abs_diff: lhs.zip(rhs).map(|(a, b)| (a - b).abs()),
        quantization_residue: rhs.map(|r| {
            let x = dim as f64 * r;
            (x - x.round()).abs()
        }),
        status,
        reason,
    })
}

const CHUNK: usize = 32;

pub fn exel_suite(cfg: &ExelSuiteConfig, tol: &Tolerances) -> Result<ExelSuiteSummary> {
    cfg.validate()?;
    let pool = super::thread_pool()?;
    let mut cases: Vec<ExelCase> = Vec::new();
    let mut validated = 0;
    let mut next = 0;
    while validated < cfg.target_cases && next < cfg.max_attempts {
        let end = (next + CHUNK).min(cfg.max_attempts);
        let chunk: Vec<ExelCase> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|i| run_case(cfg, i, tol))
                .collect::<Result<_>>()
        })?;
        for case in chunk {
            if validated >= cfg.target_cases {
                break;
            }
            if case.status != CaseStatus::Skipped {
                validated += 1;
            }
            cases.push(case);
        }
        next = end;
    }
    let skipped = cases
        .iter()
        .filter(|c| c.status == CaseStatus::Skipped)
        .count();
    let failed = cases
        .iter()
        .filter(|c| c.status == CaseStatus::Failed)
        .count();
    let max_abs_diff = cases.iter().filter_map(|c| c.abs_diff).fold(0.0, f64::max);
    let max_quantization_residue = cases
        .iter()
        .filter_map(|c| c.quantization_residue)
        .fold(0.0, f64::max);
    Ok(ExelSuiteSummary {
        config: cfg.clone(),
        attempted: cases.len(),
        validated,
        skipped,
        failed,
        max_abs_diff,
        max_quantization_residue,
        passed: failed == 0 && validated >= cfg.target_cases,
        cases,
    })
}
