//! Spin triples and their index certificate.
//!
//! H_k = S_k / s for the spin-s representation of su(2), s = (n − 1)/2. The
//! Dirac-type matrix B = Σ H_k ⊗ σ_k has n + 1 positive and n − 1 negative
//! eigenvalues, so its half-signature defect n − #neg is 1 for every n.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_normal, exp_i_hermitian, hermitian_part, kron, op_norm, CMatrix, NormalKind,
};
use crate::obstruction::branch::BranchAngle;
use crate::obstruction::exel_rhs;
use crate::tuple::UnitaryTuple;

/// Normalized spin operators (S_x, S_y, S_z)/s in the basis m = s, s−1, …, −s.
pub fn voiculescu_triple(n: usize) -> Result<[CMatrix; 3]> {
    if n < 2 {
        return Err(Error::ParamViolation(format!(
            "spin triple needs n ≥ 2, got {n}"
        )));
    }
    let s = (n as f64 - 1.0) / 2.0;
    let m = |i: usize| s - i as f64;
    let mut sx = CMatrix::zeros(n, n);
    let mut sy = CMatrix::zeros(n, n);
    let mut sz = CMatrix::zeros(n, n);
    for i in 0..n {
        sz[(i, i)] = c64(m(i) / s, 0.0);
    }
    // S₊|m⟩ = √(s(s+1) − m(m+1)) |m+1⟩; index i−1 holds m+1.
    for i in 1..n {
        let mi = m(i);
        let c = (s * (s + 1.0) - mi * (mi + 1.0)).sqrt() / s;
        sx[(i - 1, i)] = c64(c / 2.0, 0.0);
        sx[(i, i - 1)] = c64(c / 2.0, 0.0);
        sy[(i - 1, i)] = c64(0.0, -c / 2.0);
        sy[(i, i - 1)] = c64(0.0, c / 2.0);
    }
    Ok([sx, sy, sz])
}

/// U_k = exp(πi H_k / 2).
pub fn unitaries_from_selfadjoint(hs: &[CMatrix], tol: &Tolerances) -> Result<UnitaryTuple> {
    let mut us = Vec::with_capacity(hs.len());
    for h in hs {
        let scale = op_norm(h).max(1.0);
        if op_norm(&(h - h.adjoint())) > tol.normality_tol * scale {
            return Err(Error::NotNormal {
                kind: "hermitian",
                residual: op_norm(&(h - h.adjoint())),
            });
        }
        let norm = op_norm(h);
        if norm > 1.0 + tol.eig_tol {
            return Err(Error::NormTooLarge(norm));
        }
        us.push(exp_i_hermitian(h, std::f64::consts::FRAC_PI_2, tol)?);
    }
    UnitaryTuple::new(us, tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripleCertificate {
    pub bott_index_triple: i64,
    /// exel_rhs(U_j, U_k) at branch 0 for (1,2), (1,3), (2,3); None when the
    /// commutator has spectrum too close to −1.
    pub pairwise_exel: [Option<f64>; 3],
    /// ‖[H_j, H_k]‖ for (1,2), (1,3), (2,3).
    pub commutator_norms: [f64; 3],
    /// ‖U_jU_k − U_kU_j‖ for (1,2), (1,3), (2,3).
    pub pairwise_defects: [f64; 3],
    /// Smallest |λ| of B.
    pub spectral_gap: f64,
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

fn pauli() -> [CMatrix; 3] {
    let z = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[one, z, z, -one]),
    ]
}

/// Half-signature defect of B = H₁⊗σ₁ + H₂⊗σ₂ + H₃⊗σ₃, with commutator and
/// pairwise Exel data of the exponentiated triple.
pub fn bott_index_triple(
    h1: &CMatrix,
    h2: &CMatrix,
    h3: &CMatrix,
    tol: &Tolerances,
) -> Result<TripleCertificate> {
    let hs = [h1.clone(), h2.clone(), h3.clone()];
    let n = h1.nrows();
    for h in &hs {
        if h.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}×{n}, got {:?}",
                h.shape()
            )));
        }
    }
    let sig = pauli();
    let mut b = CMatrix::zeros(2 * n, 2 * n);
    for (h, s) in hs.iter().zip(&sig) {
        b += kron(h, s);
    }
    let b = hermitian_part(&b);
    let dec = eig_normal(&b, NormalKind::Hermitian, tol)?;
    let spectral_gap = dec
        .eigenvalues
        .iter()
        .map(|l| l.re.abs())
        .fold(f64::INFINITY, f64::min);
    if spectral_gap < tol.gap_tol {
        return Err(Error::NoSpectralGap(spectral_gap));
    }
    let negatives = dec.eigenvalues.iter().filter(|l| l.re < 0.0).count();

    let commutator_norms = PAIRS.map(|(j, k)| op_norm(&(&hs[j] * &hs[k] - &hs[k] * &hs[j])));
    let us = unitaries_from_selfadjoint(&hs, tol)?;
    let pairwise_defects =
        PAIRS.map(|(j, k)| op_norm(&(us.get(j) * us.get(k) - us.get(k) * us.get(j))));
    let branch = BranchAngle::new(0.0)?;
    let pairwise_exel = PAIRS.map(|(j, k)| exel_rhs(us.get(j), us.get(k), branch, tol).ok());

    Ok(TripleCertificate {
        bott_index_triple: n as i64 - negatives as i64,
        pairwise_exel,
        commutator_norms,
        pairwise_defects,
        spectral_gap,
    })
}
