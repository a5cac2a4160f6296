//! Bott element of an almost-commuting pair (θ = 0).
//!
//! With the tent f(e^{2πit}) = 1 − 2|t| (t ∈ (−1/2, 1/2]) and the bumps
//! g = √(f − f²) on t ≥ 0, h = √(f − f²) on t ≤ 0, the block matrix
//!
//! ```text
//! [ f(v)            g(v) + h(v)u ]
//! [ g(v) + u*h(v)   1 − f(v)     ]
//! ```
//!
//! is a projection when uv = vu, since gh = 0 and g² + h² = f − f². Its rank
//! minus N is the index.

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_normal, hermitian_part, identity, principal_arg, CMatrix, NormalKind,
};
use crate::obstruction::rieffel::spectral_projection_above_half;

fn tent(t: f64) -> f64 {
    1.0 - 2.0 * t.abs()
}

fn bump(t: f64) -> f64 {
    let f = tent(t);
    (f - f * f).max(0.0).sqrt()
}

#[derive(Clone, Debug)]
pub struct BottElement {
    /// The 2N×2N Hermitian almost-projection.
    pub element: CMatrix,
    pub rank: usize,
    pub index: i64,
    pub idempotency: f64,
    pub margin: f64,
}

pub fn bott_element_theta0(u: &CMatrix, v: &CMatrix, tol: &Tolerances) -> Result<BottElement> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch(format!(
            "u is {:?}, v is {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let n = u.nrows();
    let dec = eig_normal(v, NormalKind::Unitary, tol)?;
    let turns = |z: crate::linalg::C64| principal_arg(z) / (2.0 * std::f64::consts::PI);
    let f_v = dec.apply(|z| Some(c64(tent(turns(z)), 0.0)))?;
    let g_v = dec.apply(|z| {
        let t = turns(z);
        Some(c64(if t >= 0.0 { bump(t) } else { 0.0 }, 0.0))
    })?;
    let h_v = dec.apply(|z| {
        let t = turns(z);
        Some(c64(if t <= 0.0 { bump(t) } else { 0.0 }, 0.0))
    })?;

    let off = &g_v + &h_v * u;
    let mut element = CMatrix::zeros(2 * n, 2 * n);
    element.view_mut((0, 0), (n, n)).copy_from(&f_v);
    element.view_mut((0, n), (n, n)).copy_from(&off);
    element.view_mut((n, 0), (n, n)).copy_from(&off.adjoint());
    element
        .view_mut((n, n), (n, n))
        .copy_from(&(identity(n) - &f_v));
    let element = hermitian_part(&element);

    let (_, rank, idempotency, margin) = spectral_projection_above_half(&element, false, tol)?;
    Ok(BottElement {
        element,
        rank,
        index: rank as i64 - n as i64,
        idempotency,
        margin,
    })
}
