//! Per-tuple obstruction report: relation defects, trace-formula values on both
//! sides, monomial trace deviation and a verdict.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    eig_normal, normalized_trace, op_norm, phase, principal_arg, CMatrix, NormalKind, C64,
};
use crate::obstruction::bott::bott_element_theta0;
use crate::obstruction::branch::{common_gap_for_phases, BranchAngle};
use crate::obstruction::exel::{group_commutator, rhs_from_decomposition};
use crate::obstruction::rieffel::{rieffel_projection, RieffelParams};
use crate::phase::{pairs, PhaseMatrix};
use crate::reps::canonical_trace;
use crate::tuple::{unitary_power, UnitaryTuple};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairDefect {
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectBreakdown {
    pub max: f64,
    pub per_pair: Vec<PairDefect>,
}

fn check_shape(theta: &PhaseMatrix, tuple: &UnitaryTuple) -> Result<()> {
    if tuple.len() != theta.n() {
        return Err(Error::DimensionMismatch(format!(
            "tuple has {} members but Θ is {}x{}",
            tuple.len(),
            theta.n(),
            theta.n()
        )));
    }
    Ok(())
}

/// ‖v_k v_j − e^{2πiθ_{j,k}} v_j v_k‖ for every j < k, and their maximum.
pub fn defect(theta: &PhaseMatrix, tuple: &UnitaryTuple) -> Result<DefectBreakdown> {
    check_shape(theta, tuple)?;
    let per_pair: Vec<PairDefect> = pairs(theta.n())
        .map(|(j, k)| {
            let (vj, vk) = (tuple.get(j), tuple.get(k));
            let value = op_norm(&(vk * vj - vj * vk * phase(theta.theta(j, k))));
            PairDefect { j, k, value }
        })
        .collect();
    let max = per_pair.iter().map(|p| p.value).fold(0.0, f64::max);
    Ok(DefectBreakdown { max, per_pair })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Obstructed,
    Unobstructed,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchSource {
    /// log_{θ_{j,k}}
    Pair,
    /// the common-gap branch shared by all pairs
    Common,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairReport {
    pub j: usize,
    pub k: usize,
    pub theta: f64,
    pub defect: f64,
    pub branch_theta: Option<f64>,
    pub branch_source: Option<BranchSource>,
    pub exel_rhs: Option<f64>,
    pub trace_condition_residual: Option<f64>,
    pub rieffel_rank: Option<usize>,
    pub bott_index: Option<i64>,
    pub exel_lhs: Option<f64>,
    /// Why a field above is absent, if one is.
    pub notes: Vec<String>,
}

impl PairReport {
    pub fn gap_violated(&self) -> bool {
        self.exel_rhs.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub n: usize,
    pub dim: usize,
    pub theta: Vec<Vec<f64>>,
    pub defect_max: f64,
    pub common_gap_theta: Option<f64>,
    pub per_pair: Vec<PairReport>,
    pub n_monomial: u32,
    pub monomial_deviation: f64,
    pub delta_cert: f64,
    pub verdict: Verdict,
}

/// Worst angular distance (in turns) of the spectrum of each group commutator from e^{2πiθ_{j,k}}.
fn spectral_spread(theta: f64, eigenvalues: &[C64]) -> f64 {
    let target = principal_arg(phase(theta));
    eigenvalues
        .iter()
        .map(|&z| {
            let d = (principal_arg(z) - target).rem_euclid(2.0 * std::f64::consts::PI);
            d.min(2.0 * std::f64::consts::PI - d) / (2.0 * std::f64::consts::PI)
        })
        .fold(0.0, f64::max)
}

/// max over |l_j| ≤ N of |τ(v₁^{l₁}⋯v_n^{l_n}) − τ_Θ(u₁^{l₁}⋯u_n^{l_n})|.
pub fn monomial_deviation(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    n_monomial: u32,
) -> Result<f64> {
    check_shape(theta, tuple)?;
    let big_n = n_monomial as i64;
    let span = (2 * big_n + 1) as usize;
    let powers: Vec<Vec<CMatrix>> = tuple
        .matrices()
        .iter()
        .map(|v| (-big_n..=big_n).map(|l| unitary_power(v, l)).collect())
        .collect();
    let n = tuple.len();
    let dim = tuple.dim() as f64;
    let mut worst: f64 = 0.0;
    let mut exps = vec![0usize; n - 1];
    // iterate over the first n − 1 exponents; the last factor enters through a trace pairing
    loop {
        let mut prefix = powers[0][exps.first().copied().unwrap_or(big_n as usize)].clone();
        for (idx, &e) in exps.iter().enumerate().skip(1) {
            prefix = &prefix * &powers[idx][e];
        }
        for (last, last_pow) in powers[n - 1].iter().enumerate() {
            // Tr(AB) = Σ_{r,c} A_{rc} B_{cr}
            let mut tr = C64::new(0.0, 0.0);
            for r in 0..prefix.nrows() {
                for c in 0..prefix.ncols() {
                    tr += prefix[(r, c)] * last_pow[(c, r)];
                }
            }
            let mut l: Vec<i64> = exps.iter().map(|&e| e as i64 - big_n).collect();
            l.push(last as i64 - big_n);
            let canon = canonical_trace(theta, &l)?;
            worst = worst.max((tr / dim - canon).norm());
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == exps.len() {
                return Ok(worst);
            }
            exps[pos] += 1;
            if exps[pos] < span {
                break;
            }
            exps[pos] = 0;
            pos += 1;
        }
    }
}

pub fn obstruction_report(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    n_monomial: u32,
    delta_cert: f64,
    tol: &Tolerances,
) -> Result<ObstructionReport> {
    check_shape(theta, tuple)?;
    let defects = defect(theta, tuple)?;
    let dim = tuple.dim();

    let mut commutators = Vec::new();
    let mut spread: f64 = 0.0;
    for (j, k) in pairs(theta.n()) {
        let w = group_commutator(tuple.get(k), tuple.get(j));
        let dec = eig_normal(&w, NormalKind::Unitary, tol)?;
        spread = spread.max(spectral_spread(theta.theta(j, k), &dec.eigenvalues));
        commutators.push(dec);
    }
    let common = common_gap_for_phases(&theta.upper(), spread).ok();

    let mut per_pair = Vec::new();
    for (((j, k), dec), d) in pairs(theta.n()).zip(&commutators).zip(&defects.per_pair) {
        let t = theta.theta(j, k);
        let mut notes = Vec::new();
        let own = BranchAngle::new(t)?;
        let mut rhs = rhs_from_decomposition(dec, own, tol).map(|x| (x, own, BranchSource::Pair));
        if let (Err(err), Some(cg)) = (&rhs, common) {
            notes.push(format!("pair branch unusable: {err}"));
            rhs = rhs_from_decomposition(dec, cg.branch, tol)
                .map(|x| (x, cg.branch, BranchSource::Common));
        }
        let (exel_rhs, branch_theta, branch_source) = match rhs {
            Ok((x, b, s)) => (Some(x), Some(b.theta()), Some(s)),
            Err(err) => {
                notes.push(format!("no usable branch: {err}"));
                (None, None, None)
            }
        };

        let (u, v) = (tuple.get(k), tuple.get(j));
        let (mut rieffel_rank, mut bott_index, mut exel_lhs) = (None, None, None);
        if t > 0.0 {
            let params = RieffelParams::with_default_epsilon(t)?;
            match rieffel_projection(u, v, params, tol) {
                Ok(p) => {
                    rieffel_rank = Some(p.rank);
                    exel_lhs = Some(p.rank as f64 / dim as f64);
                }
                Err(err) => notes.push(format!("Rieffel element: {err}")),
            }
        } else {
            match bott_element_theta0(u, v, tol) {
                Ok(b) => {
                    bott_index = Some(b.index);
                    exel_lhs = Some(b.index as f64 / dim as f64);
                }
                Err(err) => notes.push(format!("Bott element: {err}")),
            }
        }

        per_pair.push(PairReport {
            j,
            k,
            theta: t,
            defect: d.value,
            branch_theta,
            branch_source,
            exel_rhs,
            trace_condition_residual: exel_rhs.map(|x| (x - t).abs()),
            rieffel_rank,
            bott_index,
            exel_lhs,
            notes,
        });
    }

    let monomial_dev = monomial_deviation(theta, tuple, n_monomial)?;
    let obstructed = per_pair
        .iter()
        .any(|p| p.trace_condition_residual.is_some_and(|r| r > delta_cert));
    let all_ok = per_pair
        .iter()
        .all(|p| p.trace_condition_residual.is_some_and(|r| r <= delta_cert));
    let verdict = if obstructed {
        Verdict::Obstructed
    } else if all_ok && monomial_dev <= delta_cert {
        Verdict::Unobstructed
    } else {
        Verdict::Indeterminate
    };

    Ok(ObstructionReport {
        n: theta.n(),
        dim,
        theta: theta.rows().to_vec(),
        defect_max: defects.max,
        common_gap_theta: common.map(|c| c.branch.theta()),
        per_pair,
        n_monomial,
        monomial_deviation: monomial_dev,
        delta_cert,
        verdict,
    })
}

/// Trace of a single monomial, exposed for callers that sweep exponents themselves.
pub fn monomial_trace(tuple: &UnitaryTuple, exponents: &[i64]) -> Result<C64> {
    normalized_trace(&tuple.monomial(exponents)?)
}
