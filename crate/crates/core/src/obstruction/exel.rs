use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{eig_normal, normalized_trace, CMatrix, NormalKind};
use crate::obstruction::branch::{log_from_decomposition, BranchAngle};
use crate::obstruction::rieffel::{rieffel_projection, RieffelParams};

/// u v u* v*
pub fn group_commutator(u: &CMatrix, v: &CMatrix) -> CMatrix {
    u * v * u.adjoint() * v.adjoint()
}

/// (1/2πi)·τ(log_θ(uvu*v*)).
pub fn exel_rhs(u: &CMatrix, v: &CMatrix, branch: BranchAngle, tol: &Tolerances) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch(format!(
            "u is {:?}, v is {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let w = group_commutator(u, v);
    let dec = eig_normal(&w, NormalKind::Unitary, tol)?;
    rhs_from_decomposition(&dec, branch, tol)
}

pub(crate) fn rhs_from_decomposition(
    dec: &crate::linalg::SpectralDecomposition,
    branch: BranchAngle,
    tol: &Tolerances,
) -> Result<f64> {
    let log = log_from_decomposition(dec, branch, tol)?;
    let tr = normalized_trace(&log)?;
    if tr.re.abs() > tol.imag_residue_tol {
        return Err(Error::ImaginaryResidue(tr.re));
    }
    Ok(tr.im / (2.0 * std::f64::consts::PI))
}

/// τ(R^θ(u, v)) = rank / N.
pub fn exel_lhs(u: &CMatrix, v: &CMatrix, params: RieffelParams, tol: &Tolerances) -> Result<f64> {
    let proj = rieffel_projection(u, v, params, tol)?;
    Ok(proj.rank as f64 / u.nrows() as f64)
}
