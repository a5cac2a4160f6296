//! Central tolerance record shared by every module.
//!
//! The defaults are the contract values; experiments may override them from a
//! JSON file (`--tol-config`), where any missing key keeps its default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Maximum ‖U*U − I‖ for a matrix to count as unitary.
    pub unitarity_tol: f64,
    /// Relative reconstruction residual allowed for eigendecompositions.
    pub eig_tol: f64,
    /// Minimum spectral distance to a branch cut or to the 1/2 threshold.
    pub gap_tol: f64,
    /// Relative normality residual accepted on input to `eig_normal`.
    pub normality_tol: f64,
    /// Largest real part tolerated in the trace of a skew-Hermitian logarithm.
    pub imag_residue_tol: f64,
    /// Certification threshold on trace-condition residuals.
    pub delta_cert: f64,
    /// Exponent bound for the monomial trace comparison.
    pub n_monomial: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity_tol: 1e-10,
            eig_tol: 1e-9,
            gap_tol: 1e-6,
            normality_tol: 1e-8,
            imag_residue_tol: 1e-12,
            delta_cert: 1e-6,
            n_monomial: 3,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("unitarity_tol", self.unitarity_tol),
            ("eig_tol", self.eig_tol),
            ("gap_tol", self.gap_tol),
            ("normality_tol", self.normality_tol),
            ("imag_residue_tol", self.imag_residue_tol),
            ("delta_cert", self.delta_cert),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let tol: Tolerances = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        tol.validate()?;
        Ok(tol)
    }
}
