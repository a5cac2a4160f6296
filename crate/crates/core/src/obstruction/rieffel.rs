//! Rieffel functions, the Rieffel element and its spectral projection.
//!
//! f and g follow the piecewise definitions on t ∈ [0, 1) (z = e^{2πit}).
//! The functions satisfy, pointwise,
//!
//! ```text
//! g(t)·g(t − θ) = 0
//! g(t)·[f(t) + f(t − θ)] = g(t)
//! f(t) = f(t)² + g(t)² + g(t + θ)²
//! ```
//!
//! and these are exactly the relations that make g(u)v + f(u) + v*g(u) a
//! projection whenever uv = e^{2πiθ}vu, because v*h(u)v = h(e^{2πiθ}u).

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_normal, hermitian_part, op_norm, principal_arg, CMatrix, NormalKind, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RieffelParams {
    theta: f64,
    epsilon: f64,
}

impl RieffelParams {
    /// Requires 0 < ε ≤ θ < θ + ε ≤ 1.
    pub fn new(theta: f64, epsilon: f64) -> Result<Self> {
        let ok = theta.is_finite()
            && epsilon.is_finite()
            && theta > 0.0
            && theta < 1.0
            && epsilon > 0.0
            && epsilon <= theta
            && theta + epsilon <= 1.0;
        if !ok {
            return Err(Error::ParamViolation(format!("θ = {theta}, ε = {epsilon}")));
        }
        Ok(Self { theta, epsilon })
    }

    /// ε = min(θ, 1 − θ, 1/4).
    pub fn with_default_epsilon(theta: f64) -> Result<Self> {
        Self::new(theta, theta.min(1.0 - theta).min(0.25))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn functions(&self) -> RieffelFunctions {
        RieffelFunctions { params: *self }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RieffelFunctions {
    params: RieffelParams,
}

impl RieffelFunctions {
    /// f(e^{2πit}); `t` is reduced modulo 1.
    pub fn f(&self, t: f64) -> f64 {
        let RieffelParams { theta, epsilon } = self.params;
        let t = t.rem_euclid(1.0);
        if t <= epsilon {
            t / epsilon
        } else if t <= theta {
            1.0
        } else if t <= theta + epsilon {
            (theta + epsilon - t) / epsilon
        } else {
            0.0
        }
    }

    /// g(e^{2πit}) = [f(1 − f)]^{1/2} on [θ, θ + ε], zero elsewhere.
    pub fn g(&self, t: f64) -> f64 {
        let RieffelParams { theta, epsilon } = self.params;
        let t = t.rem_euclid(1.0);
        if t >= theta && t <= theta + epsilon {
            let f = self.f(t);
            (f * (1.0 - f)).max(0.0).sqrt()
        } else {
            0.0
        }
    }

    pub fn f_at(&self, z: C64) -> f64 {
        self.f(turns(z))
    }

    pub fn g_at(&self, z: C64) -> f64 {
        self.g(turns(z))
    }
}

fn turns(z: C64) -> f64 {
    (principal_arg(z) / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
}

/// e^θ(u, v) = g(u)v + f(u) + v*g(u), Hermitian.
pub fn rieffel_element(
    u: &CMatrix,
    v: &CMatrix,
    params: RieffelParams,
    tol: &Tolerances,
) -> Result<CMatrix> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch(format!(
            "u is {:?}, v is {:?}",
            u.shape(),
            v.shape()
        )));
    }
    let fun = params.functions();
    let dec = eig_normal(u, NormalKind::Unitary, tol)?;
    let f_u = dec.apply(|z| Some(c64(fun.f_at(z), 0.0)))?;
    let g_u = dec.apply(|z| Some(c64(fun.g_at(z), 0.0)))?;
    let g_v = &g_u * v;
    let e = &g_v + f_u + g_v.adjoint();
    Ok(hermitian_part(&e))
}

#[derive(Clone, Debug)]
pub struct RieffelProjection {
    pub projection: CMatrix,
    pub rank: usize,
    /// ‖e² − e‖ of the underlying element.
    pub idempotency: f64,
    /// min_j |λ_j − 1/2| over the spectrum of the element.
    pub margin: f64,
}

/// χ_{(1/2,∞)}(e^θ(u, v)); requires ‖e² − e‖ < 1/4 and no eigenvalue within gap_tol of 1/2.
pub fn rieffel_projection(
    u: &CMatrix,
    v: &CMatrix,
    params: RieffelParams,
    tol: &Tolerances,
) -> Result<RieffelProjection> {
    let e = rieffel_element(u, v, params, tol)?;
    spectral_projection_above_half(&e, true, tol).map(|(projection, rank, idempotency, margin)| {
        RieffelProjection {
            projection,
            rank,
            idempotency,
            margin,
        }
    })
}

/// Spectral projection of a Hermitian almost-idempotent onto (1/2, ∞).
pub(crate) fn spectral_projection_above_half(
    e: &CMatrix,
    require_quarter_bound: bool,
    tol: &Tolerances,
) -> Result<(CMatrix, usize, f64, f64)> {
    let idempotency = op_norm(&(e * e - e));
    let dec = eig_normal(e, NormalKind::Hermitian, tol)?;
    let margin = dec
        .eigenvalues
        .iter()
        .map(|l| (l.re - 0.5).abs())
        .fold(f64::INFINITY, f64::min);
    if (require_quarter_bound && idempotency >= 0.25) || margin < tol.gap_tol {
        return Err(Error::GapAtHalfViolation {
            idempotency,
            margin,
        });
    }
    let rank = dec.eigenvalues.iter().filter(|l| l.re > 0.5).count();
    let projection = dec.apply(|l| Some(c64(if l.re > 0.5 { 1.0 } else { 0.0 }, 0.0)))?;
    Ok((projection, rank, idempotency, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::phase::RationalPhase;
    use crate::reps::rational_pair_rep;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn params_are_validated() {
        assert!(RieffelParams::new(0.5, 0.5).is_ok());
        assert!(RieffelParams::new(0.3, 0.4).is_err());
        assert!(RieffelParams::new(0.8, 0.25).is_err());
        assert!(RieffelParams::new(0.0, 0.1).is_err());
        assert!(RieffelParams::new(1.0, 0.1).is_err());
        let p = RieffelParams::with_default_epsilon(0.9).unwrap();
        assert!((p.epsilon() - 0.1).abs() < 1e-15);
        let p = RieffelParams::with_default_epsilon(0.5).unwrap();
        assert_eq!(p.epsilon(), 0.25);
    }

    #[test]
    fn function_values() {
        let fun = RieffelParams::new(0.5, 0.5).unwrap().functions();
        // ramp ε⁻¹t at t = 1/4
        assert_eq!(fun.f(0.25), 0.5);
        assert_eq!(fun.f(0.0), 0.0);
        assert_eq!(fun.f_at(c64(1.0, 0.0)), 0.0);
        let fun = RieffelParams::new(0.3, 0.2).unwrap().functions();
        for k in 0..=300 {
            let t = 0.3 * k as f64 / 300.0;
            assert_eq!(fun.g(t), 0.0, "t = {t}");
        }
        assert_eq!(fun.f(0.25), 1.0);
        assert!((fun.f(0.4) - 0.5).abs() < 1e-15);
        assert!((fun.g(0.4) - 0.5).abs() < 1e-15);
        assert_eq!(fun.f(0.7), 0.0);
    }

    #[test]
    fn shift_direction_matters() {
        // the mirrored shift does not satisfy the third identity for θ ≠ 1/2
        let p = RieffelParams::with_default_epsilon(1.0 / 3.0).unwrap();
        let fun = p.functions();
        let t = 0.1;
        let good = fun.f(t) - fun.f(t).powi(2) - fun.g(t).powi(2) - fun.g(t + p.theta()).powi(2);
        let mirrored =
            fun.f(t) - fun.f(t).powi(2) - fun.g(t).powi(2) - fun.g(t - p.theta()).powi(2);
        assert!(good.abs() < 1e-15);
        assert!(mirrored.abs() > 0.1);
    }

    #[test]
    fn exact_pair_gives_projection() {
        for (p, q, m) in [(1, 3, 1), (2, 5, 2), (3, 7, 1), (10, 31, 1)] {
            let theta = RationalPhase::new(p, q).unwrap();
            let pair = rational_pair_rep(theta, m);
            let params = RieffelParams::with_default_epsilon(theta.value()).unwrap();
            let e = rieffel_element(pair.get(1), pair.get(0), params, &tol()).unwrap();
            assert!(op_norm(&(&e * &e - &e)) < 1e-10, "{p}/{q}");
            let proj = rieffel_projection(pair.get(1), pair.get(0), params, &tol()).unwrap();
            assert_eq!(proj.rank, p as usize * m);
            let pr = &proj.projection;
            assert!(op_norm(&(pr * pr - pr)) < 1e-10);
            assert!(op_norm(&(pr - pr.adjoint())) < 1e-10);
        }
    }

    #[test]
    fn identity_pair_gives_zero_element() {
        let params = RieffelParams::new(0.5, 0.5).unwrap();
        let e = rieffel_element(&identity(3), &identity(3), params, &tol()).unwrap();
        assert!(op_norm(&e) < 1e-15);
        let proj = rieffel_projection(&identity(3), &identity(3), params, &tol()).unwrap();
        assert_eq!(proj.rank, 0);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let params = RieffelParams::new(0.5, 0.5).unwrap();
        let r = rieffel_element(&identity(2), &identity(3), params, &tol());
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
