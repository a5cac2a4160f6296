//! Penalized repair on U(N)ⁿ.
//!
//! Minimizes J(ṽ) = Σ_{j<k} ‖ṽ_kṽ_j − e^{2πiθ_{j,k}}ṽ_jṽ_k‖_F² + μ Σ_j ‖ṽ_j − v_j‖_F².
//! Each iteration solves a damped Gauss-Newton system for a skew-Hermitian
//! update X_j (ṽ_j ↦ ṽ_j·cayley(αX_j)) with conjugate gradients, then picks α by
//! Armijo backtracking. Plain gradient steps stall once the residual is small:
//! the exact solutions through a planted point form a singular variety, and
//! the damped normal equations are what make progress along it.
//!
//! The distance weight is continued downward (μ, μ/100, …, then 0) whenever a
//! stage stops making relative progress. A fixed μ > 0 has minimizers with
//! nonzero defect, while the last stage (μ = 0) drives the relations to
//! machine precision from a point the penalty kept close to the input.
//! Lowering μ never raises J, so the recorded objective stays non-increasing.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{c64, cayley, op_norm, phase, real_inner, skew_part, CMatrix, C64};
use crate::matrix_io::MatrixJson;
use crate::obstruction::defect;
use crate::phase::{pairs, PhaseMatrix};
use crate::search::objective::{objective_unchecked, Objective};
use crate::tuple::UnitaryTuple;

const MAX_BACKTRACKS: usize = 60;
const STAGE_MIN_PROGRESS: f64 = 1e-3;
const STAGE_MAX_ITERS: usize = 20;
const MU_DECAY: f64 = 0.01;
const CG_MAX_ITERS: usize = 60;
const CG_REL_TOL: f64 = 1e-10;
const MU_FLOOR_RATIO: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Initial weight of the distance penalty.
    pub mu: f64,
    pub max_iters: usize,
    pub step_init: f64,
    pub armijo_c: f64,
    /// Operator-norm defect at which the search stops successfully.
    pub defect_target: f64,
    /// Recorded with the result; the descent itself is deterministic.
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            mu: 1.0,
            max_iters: 5000,
            step_init: 1.0,
            armijo_c: 1e-4,
            defect_target: 1e-10,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mu = {} must be ≥ 0",
                self.mu
            )));
        }
        if !(self.step_init.is_finite() && self.step_init > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step_init = {} must be > 0",
                self.step_init
            )));
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "armijo_c = {} must lie in (0, 1)",
                self.armijo_c
            )));
        }
        if !(self.defect_target.is_finite() && self.defect_target > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "defect_target = {} must be > 0",
                self.defect_target
            )));
        }
        Ok(())
    }
}

fn serialize_tuple<S: Serializer>(t: &UnitaryTuple, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mats: Vec<MatrixJson> = t.matrices().iter().map(MatrixJson::from_matrix).collect();
    mats.serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    #[serde(serialize_with = "serialize_tuple")]
    pub repaired: UnitaryTuple,
    pub final_defect: f64,
    /// max_j ‖ṽ_j − v_j‖_op
    pub distance_moved: f64,
    pub iterations: usize,
    pub converged: bool,
    /// J after every accepted step, starting with the initial value.
    pub objective_trace: Vec<f64>,
    /// Largest ‖ṽ_j*ṽ_j − I‖_op over every accepted iterate.
    pub unitarity_residual: f64,
    pub seed: u64,
}

fn retract(vs: &[CMatrix], xs: &[CMatrix], alpha: f64) -> Result<Vec<CMatrix>> {
    vs.iter()
        .zip(xs)
        .map(|(v, x)| Ok(v * cayley(&(x * c64(alpha, 0.0)))?))
        .collect()
}

fn inner(a: &[CMatrix], b: &[CMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| real_inner(x, y)).sum()
}

fn axpy(y: &mut [CMatrix], alpha: f64, x: &[CMatrix]) {
    let a = c64(alpha, 0.0);
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

struct PairTerm {
    j: usize,
    k: usize,
    c: C64,
    /// ṽ_kṽ_j and ṽ_jṽ_k
    kj: CMatrix,
    jk: CMatrix,
}

/// Residual map F(ṽ) = (relation residuals, √μ(ṽ_j − v_j)) and its derivative
/// in the coordinates ṽ_j ↦ ṽ_j(I + X_j), X_j skew-Hermitian.
struct Linearization<'a> {
    vs: &'a [CMatrix],
    adjoints: Vec<CMatrix>,
    terms: Vec<PairTerm>,
    sqrt_mu: f64,
}

impl<'a> Linearization<'a> {
    fn new(theta: &PhaseMatrix, vs: &'a [CMatrix], mu: f64) -> Self {
        let terms = pairs(vs.len())
            .map(|(j, k)| PairTerm {
                j,
                k,
                c: phase(theta.theta(j, k)),
                kj: &vs[k] * &vs[j],
                jk: &vs[j] * &vs[k],
            })
            .collect();
        Self {
            vs,
            adjoints: vs.iter().map(|v| v.adjoint()).collect(),
            terms,
            sqrt_mu: mu.sqrt(),
        }
    }

    fn residual(&self, anchor: &[CMatrix]) -> Vec<CMatrix> {
        let mut out: Vec<CMatrix> = self.terms.iter().map(|t| &t.kj - &t.jk * t.c).collect();
        if self.sqrt_mu > 0.0 {
            let s = c64(self.sqrt_mu, 0.0);
            out.extend(self.vs.iter().zip(anchor).map(|(v, a)| (v - a) * s));
        }
        out
    }

    fn apply(&self, xs: &[CMatrix]) -> Vec<CMatrix> {
        let vs = self.vs;
        let mut out: Vec<CMatrix> = self
            .terms
            .iter()
            .map(|t| {
                let (vj, vk) = (&vs[t.j], &vs[t.k]);
                let (xj, xk) = (&xs[t.j], &xs[t.k]);
                vk * xk * vj + &t.kj * xj - (vj * xj * vk + &t.jk * xk) * t.c
            })
            .collect();
        if self.sqrt_mu > 0.0 {
            let s = c64(self.sqrt_mu, 0.0);
            out.extend(vs.iter().zip(xs).map(|(v, x)| v * x * s));
        }
        out
    }

    fn adjoint(&self, rs: &[CMatrix]) -> Vec<CMatrix> {
        let dim = self.vs[0].nrows();
        let adj = &self.adjoints;
        let mut out = vec![CMatrix::zeros(dim, dim); self.vs.len()];
        for (t, r) in self.terms.iter().zip(rs) {
            let cc = t.c.conj();
            out[t.j] += t.kj.adjoint() * r - &adj[t.j] * r * &adj[t.k] * cc;
            out[t.k] += &adj[t.k] * r * &adj[t.j] - t.jk.adjoint() * r * cc;
        }
        if self.sqrt_mu > 0.0 {
            let s = c64(self.sqrt_mu, 0.0);
            for ((o, a), r) in out.iter_mut().zip(adj).zip(&rs[self.terms.len()..]) {
                *o += a * r * s;
            }
        }
        out.into_iter().map(|m| skew_part(&m)).collect()
    }

    /// Approximately solves (J*J + λ) X = −J*F by conjugate gradients.
    fn damped_step(&self, rhs: &[CMatrix], lambda: f64) -> Vec<CMatrix> {
        let mut x: Vec<CMatrix> = rhs
            .iter()
            .map(|m| CMatrix::zeros(m.nrows(), m.ncols()))
            .collect();
        let mut r: Vec<CMatrix> = rhs.to_vec();
        let mut p = r.clone();
        let mut rr = inner(&r, &r);
        let stop = rr * CG_REL_TOL * CG_REL_TOL;
        for _ in 0..CG_MAX_ITERS {
            if rr <= stop || rr == 0.0 {
                break;
            }
            let mut ap = self.adjoint(&self.apply(&p));
            axpy(&mut ap, lambda, &p);
            let pap = inner(&p, &ap);
            if pap <= 0.0 {
                break;
            }
            let a = rr / pap;
            axpy(&mut x, a, &p);
            axpy(&mut r, -a, &ap);
            let rr_new = inner(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + &*pi * c64(beta, 0.0);
            }
        }
        x
    }
}

pub fn repair(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    cfg.validate()?;
    if tuple.len() != theta.n() {
        return Err(Error::DimensionMismatch(format!(
            "Θ is {n}x{n}, tuple has {}",
            tuple.len(),
            n = theta.n()
        )));
    }
    let start = defect(theta, tuple)?;
    if start.max >= 2.0 {
        return Err(Error::InvalidConfig(format!(
            "starting defect {:.3} is not below 2",
            start.max
        )));
    }
    let anchor: Vec<CMatrix> = tuple.matrices().to_vec();
    let mut vs = anchor.clone();
    let mut mu = cfg.mu;
    let mu_floor = cfg.mu * MU_FLOOR_RATIO;
    let mut obj: Objective = objective_unchecked(theta, &vs, &anchor, mu);
    let mut trace = vec![obj.total];
    let mut stage_iters = 0usize;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut unitarity_residual: f64 = 0.0;

    loop {
        if obj.relation.sqrt() <= cfg.defect_target {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iters {
            break;
        }
        let lin = Linearization::new(theta, &vs, mu);
        let f = lin.residual(&anchor);
        let neg_grad_half: Vec<CMatrix> = lin.adjoint(&f).into_iter().map(|m| -m).collect();
        let slope = -2.0 * inner(&neg_grad_half, &neg_grad_half);
        let lambda = obj.total.sqrt();
        let step = lin.damped_step(&neg_grad_half, lambda);
        // directional derivative of J along the step
        let dir_slope = -2.0 * inner(&neg_grad_half, &step);
        let (dir, dir_slope) = if dir_slope < 0.0 {
            (step, dir_slope)
        } else {
            (neg_grad_half, slope)
        };

        let mut trial = cfg.step_init;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand = retract(&vs, &dir, trial)?;
            let cand_obj = objective_unchecked(theta, &cand, &anchor, mu);
            if cand_obj.total < obj.total
                && cand_obj.total <= obj.total + cfg.armijo_c * trial * dir_slope
            {
                accepted = Some((cand, cand_obj));
                break;
            }
            trial *= 0.5;
        }

        let progress = match accepted {
            Some((cand, cand_obj)) => {
                let rel = (obj.total - cand_obj.total) / obj.total.max(f64::MIN_POSITIVE);
                vs = cand;
                obj = cand_obj;
                unitarity_residual = vs
                    .iter()
                    .map(crate::linalg::unitarity_residual)
                    .fold(unitarity_residual, f64::max);
                iterations += 1;
                stage_iters += 1;
                trace.push(obj.total);
                Some(rel)
            }
            None => None,
        };

        if mu > 0.0 {
            let stage_done = match progress {
                Some(rel) => rel < STAGE_MIN_PROGRESS || stage_iters >= STAGE_MAX_ITERS,
                None => true,
            };
            if stage_done {
                mu = if mu * MU_DECAY < mu_floor {
                    0.0
                } else {
                    mu * MU_DECAY
                };
                obj = objective_unchecked(theta, &vs, &anchor, mu);
                stage_iters = 0;
            }
        } else if progress.is_none() {
            break;
        }
    }

    let repaired = UnitaryTuple::from_matrices(vs)?;
    let final_defect = defect(theta, &repaired)?.max;
    let converged = converged && final_defect <= cfg.defect_target;
    let unitarity_residual = repaired
        .matrices()
        .iter()
        .map(crate::linalg::unitarity_residual)
        .fold(unitarity_residual, f64::max);
    let distance_moved = repaired
        .matrices()
        .iter()
        .zip(&anchor)
        .map(|(a, b)| op_norm(&(a - b)))
        .fold(0.0, f64::max);
    let result = SearchResult {
        repaired,
        final_defect,
        distance_moved,
        iterations,
        converged,
        objective_trace: trace,
        unitarity_residual,
        seed: cfg.seed,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::Diverged(Box::new(result)))
    }
}

/// Runs `repair`, folding a `Diverged` outcome back into its (unconverged) result.
pub fn repair_outcome(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    match repair(theta, tuple, cfg) {
        Ok(r) => Ok(r),
        Err(Error::Diverged(r)) => Ok(*r),
        Err(e) => Err(e),
    }
}
