use std::f64::consts::PI;

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, eig_normal, principal_arg, skew_part, CMatrix, NormalKind, SpectralDecomposition,
};
use crate::phase::PhaseMatrix;

/// Branch parameter θ ∈ [0, 1) of log_θ; the cut sits at angle 2πθ + π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchAngle {
    theta: f64,
}

impl BranchAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..1.0).contains(&theta)) {
            return Err(Error::InvalidPhase(format!(
                "branch θ = {theta} is outside [0, 1)"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cut_angle(&self) -> f64 {
        2.0 * PI * self.theta + PI
    }

    /// Angle of `z` lifted into (2πθ − π, 2πθ + π], with its distance to the cut.
    pub fn lift(&self, z: crate::linalg::C64) -> (f64, f64) {
        let center = 2.0 * PI * self.theta;
        let mut d = principal_arg(z) - center;
        d = (d + PI).rem_euclid(2.0 * PI) - PI;
        if d <= -PI {
            d += 2.0 * PI;
        }
        (center + d, PI - d.abs())
    }

    /// Lifted angles of every eigenvalue, failing if one is within `gap_tol` of the cut.
    pub fn lift_spectrum(&self, dec: &SpectralDecomposition, gap_tol: f64) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(dec.dim());
        for &lambda in &dec.eigenvalues {
            let (angle, distance) = self.lift(lambda);
            if distance < gap_tol {
                return Err(Error::GapViolation { distance });
            }
            out.push(angle);
        }
        Ok(out)
    }
}

/// log_θ(U), skew-Hermitian, with log_θ(e^{2πiθ}) = 2πiθ.
pub fn log_branch(u: &CMatrix, branch: BranchAngle, tol: &Tolerances) -> Result<CMatrix> {
    let dec = eig_normal(u, NormalKind::Unitary, tol)?;
    log_from_decomposition(&dec, branch, tol)
}

pub(crate) fn log_from_decomposition(
    dec: &SpectralDecomposition,
    branch: BranchAngle,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let angles = branch.lift_spectrum(dec, tol.gap_tol)?;
    let values: Vec<_> = angles.iter().map(|&a| c64(0.0, a)).collect();
    Ok(skew_part(&dec.synthesize(&values)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommonGap {
    pub branch: BranchAngle,
    /// Distance (in turns) from the cut point to the nearest phase arc.
    pub margin: f64,
}

/// Branch whose cut is the midpoint of the largest arc left free by
/// the closed arcs [θ − δ, θ + δ] (turns) around every phase.
pub fn common_gap_for_phases(phases: &[f64], delta: f64) -> Result<CommonGap> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gap half-width {delta} must be non-negative"
        )));
    }
    if phases.is_empty() {
        return Err(Error::InvalidConfig("no phases given".into()));
    }
    let mut centers: Vec<f64> = phases.iter().map(|t| t.rem_euclid(1.0)).collect();
    centers.sort_by(f64::total_cmp);
    let m = centers.len();
    let (mut best_start, mut best_gap) = (centers[m - 1], centers[0] + 1.0 - centers[m - 1]);
    for w in centers.windows(2) {
        let gap = w[1] - w[0];
        if gap > best_gap {
            best_gap = gap;
            best_start = w[0];
        }
    }
    let free = best_gap - 2.0 * delta;
    if free <= 0.0 {
        return Err(Error::NoGap);
    }
    let midpoint = best_start + best_gap / 2.0;
    let theta = (midpoint - 0.5).rem_euclid(1.0);
    let theta = if theta >= 1.0 { 0.0 } else { theta };
    Ok(CommonGap {
        branch: BranchAngle::new(theta)?,
        margin: free / 2.0,
    })
}

/// Common gap over the upper-triangular phases of Θ.
pub fn common_gap_theta(theta: &PhaseMatrix, delta: f64) -> Result<CommonGap> {
    common_gap_for_phases(&theta.upper(), delta)
}
