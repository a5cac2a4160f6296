use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{ensure_unitary, identity, CMatrix};

/// Ordered unitaries (v₁, …, v_n) of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryTuple {
    mats: Vec<CMatrix>,
}

impl UnitaryTuple {
    pub fn new(mats: Vec<CMatrix>, tol: &Tolerances) -> Result<Self> {
        let tuple = Self::from_matrices(mats)?;
        for m in &tuple.mats {
            ensure_unitary(m, tol)?;
        }
        Ok(tuple)
    }

    /// Checks shapes only; unitarity is the caller's responsibility.
    pub fn from_matrices(mats: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::DimensionMismatch("empty tuple".into()));
        };
        let n = first.nrows();
        for (j, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "member {j} is {}x{}, expected {n}x{n}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(Self { mats })
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn get(&self, j: usize) -> &CMatrix {
        &self.mats[j]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn into_matrices(self) -> Vec<CMatrix> {
        self.mats
    }

    /// (W v₁ W*, …, W v_n W*)
    pub fn conjugated(&self, w: &CMatrix) -> Self {
        let w_adj = w.adjoint();
        Self {
            mats: self.mats.iter().map(|v| w * v * &w_adj).collect(),
        }
    }

    /// max_j ‖v_j − other_j‖_op
    pub fn distance(&self, other: &UnitaryTuple) -> f64 {
        self.mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| crate::linalg::op_norm(&(a - b)))
            .fold(0.0, f64::max)
    }

    /// v₁^{l₁} v₂^{l₂} ⋯ v_n^{l_n}
    pub fn monomial(&self, exponents: &[i64]) -> Result<CMatrix> {
        if exponents.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: exponents.len(),
            });
        }
        let mut out = identity(self.dim());
        for (v, &l) in self.mats.iter().zip(exponents) {
            out *= unitary_power(v, l);
        }
        Ok(out)
    }
}

/// U^k, using U* for negative powers.
pub fn unitary_power(u: &CMatrix, k: i64) -> CMatrix {
    let base = if k < 0 { u.adjoint() } else { u.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = identity(u.nrows());
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}
