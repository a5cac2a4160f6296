//! J(ṽ) = Σ_{j<k} ‖ṽ_kṽ_j − e^{2πiθ_{j,k}}ṽ_jṽ_k‖_F² + μ Σ_j ‖ṽ_j − a_j‖_F²
//! and its Riemannian gradient on U(N)ⁿ with the embedded metric Re Tr(A*B).

use crate::error::{Error, Result};
use crate::linalg::{c64, phase, CMatrix};
use crate::phase::{pairs, PhaseMatrix};
use crate::tuple::UnitaryTuple;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objective {
    /// Σ ‖relation residual‖_F²
    pub relation: f64,
    /// Σ ‖ṽ_j − a_j‖_F²
    pub distance: f64,
    pub total: f64,
}

fn check(theta: &PhaseMatrix, tuple: &UnitaryTuple, anchor: &UnitaryTuple) -> Result<()> {
    if tuple.len() != theta.n() || anchor.len() != theta.n() {
        return Err(Error::DimensionMismatch(format!(
            "Θ is {n}x{n}, tuple has {}, anchor has {}",
            tuple.len(),
            anchor.len(),
            n = theta.n()
        )));
    }
    if tuple.dim() != anchor.dim() {
        return Err(Error::DimensionMismatch(format!(
            "tuple dim {} vs anchor dim {}",
            tuple.dim(),
            anchor.dim()
        )));
    }
    Ok(())
}

fn frob_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn objective(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    anchor: &UnitaryTuple,
    mu: f64,
) -> Result<Objective> {
    check(theta, tuple, anchor)?;
    Ok(objective_unchecked(
        theta,
        tuple.matrices(),
        anchor.matrices(),
        mu,
    ))
}

pub(crate) fn objective_unchecked(
    theta: &PhaseMatrix,
    vs: &[CMatrix],
    anchor: &[CMatrix],
    mu: f64,
) -> Objective {
    let relation: f64 = pairs(theta.n())
        .map(|(j, k)| frob_sq(&(&vs[k] * &vs[j] - &vs[j] * &vs[k] * phase(theta.theta(j, k)))))
        .sum();
    let distance: f64 = if mu == 0.0 {
        0.0
    } else {
        vs.iter().zip(anchor).map(|(v, a)| frob_sq(&(v - a))).sum()
    };
    Objective {
        relation,
        distance,
        total: relation + mu * distance,
    }
}

/// Euclidean gradient of J, one matrix per member.
pub(crate) fn euclidean_gradient(
    theta: &PhaseMatrix,
    vs: &[CMatrix],
    anchor: &[CMatrix],
    mu: f64,
) -> Vec<CMatrix> {
    let n = vs.len();
    let dim = vs[0].nrows();
    let mut grads = vec![CMatrix::zeros(dim, dim); n];
    let two = c64(2.0, 0.0);
    for (j, k) in pairs(n) {
        let c = phase(theta.theta(j, k));
        let (vj, vk) = (&vs[j], &vs[k]);
        let r = vk * vj - vj * vk * c;
        let (vj_adj, vk_adj) = (vj.adjoint(), vk.adjoint());
        grads[j] += (&vk_adj * &r - &r * &vk_adj * c.conj()) * two;
        grads[k] += (&r * &vj_adj - &vj_adj * &r * c.conj()) * two;
    }
    if mu != 0.0 {
        for ((g, v), a) in grads.iter_mut().zip(vs).zip(anchor) {
            *g += (v - a) * c64(2.0 * mu, 0.0);
        }
    }
    grads
}

/// Projection (G − V G* V)/2 of each Euclidean gradient onto the tangent space at V.
pub(crate) fn project_tangent(vs: &[CMatrix], grads: Vec<CMatrix>) -> Vec<CMatrix> {
    grads
        .into_iter()
        .zip(vs)
        .map(|(g, v)| (&g - v * g.adjoint() * v) * c64(0.5, 0.0))
        .collect()
}

pub fn riemannian_gradient(
    theta: &PhaseMatrix,
    tuple: &UnitaryTuple,
    anchor: &UnitaryTuple,
    mu: f64,
) -> Result<Vec<CMatrix>> {
    check(theta, tuple, anchor)?;
    let vs = tuple.matrices();
    Ok(project_tangent(
        vs,
        euclidean_gradient(theta, vs, anchor.matrices(), mu),
    ))
}
