//! Dense complex linear algebra for normal matrices.
//!
//! Everything downstream (logarithms, Rieffel elements, spectral projections,
//! index counts) goes through [`eig_normal`] and [`func_calc`]. Hermitian
//! matrices use the symmetric tridiagonal QR solver; unitary matrices use the
//! complex Schur form, which is diagonal for a normal input, so the Schur
//! vectors are an orthonormal eigenbasis.

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{Complex, DMatrix};

use crate::config::Tolerances;
use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const MAX_SWEEPS_PER_DIM: usize = 200;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// e^{2πi·turns}
#[inline]
pub fn phase(turns: f64) -> C64 {
    let a = 2.0 * std::f64::consts::PI * turns;
    c64(a.cos(), a.sin())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diag(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Largest singular value.
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().max()
}

/// (1/N)·Tr A
pub fn normalized_trace(a: &CMatrix) -> Result<C64> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Err(Error::DimensionMismatch(
            "empty matrix has no normalized trace".into(),
        ));
    }
    Ok(a.trace() / n as f64)
}

/// ‖U*U − I‖_op
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    op_norm(&(u.adjoint() * u - identity(n)))
}

pub fn ensure_unitary(u: &CMatrix, tol: &Tolerances) -> Result<()> {
    ensure_square(u)?;
    if !is_finite(u) {
        return Err(Error::NonFinite);
    }
    let residual = unitarity_residual(u);
    if residual > tol.unitarity_tol {
        return Err(Error::NotUnitary { residual });
    }
    Ok(())
}

/// Hermitian part (A + A*)/2.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

/// Skew-Hermitian part (A − A*)/2.
pub fn skew_part(a: &CMatrix) -> CMatrix {
    (a - a.adjoint()) * c64(0.5, 0.0)
}

/// Real inner product Re Tr(A*B) on matrices viewed as a real vector space.
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

/// Which normal structure `eig_normal` should exploit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalKind {
    Hermitian,
    Unitary,
}

impl NormalKind {
    fn name(self) -> &'static str {
        match self {
            NormalKind::Hermitian => "Hermitian",
            NormalKind::Unitary => "unitary",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<C64>,
    /// Orthonormal eigenvectors stored as columns, in eigenvalue order.
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(values) V*
    pub fn synthesize(&self, values: &[C64]) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &w) in values.iter().enumerate() {
            for z in scaled.column_mut(j).iter_mut() {
                *z *= w;
            }
        }
        scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.synthesize(&self.eigenvalues)
    }

    /// Applies `f` to every eigenvalue. `None` from `f` is a domain violation.
    pub fn apply<F>(&self, f: F) -> Result<CMatrix>
    where
        F: Fn(C64) -> Option<C64>,
    {
        let mut values = Vec::with_capacity(self.dim());
        for &lambda in &self.eigenvalues {
            let w = f(lambda).ok_or(Error::DomainViolation {
                re: lambda.re,
                im: lambda.im,
            })?;
            values.push(w);
        }
        let out = self.synthesize(&values);
        if values.iter().all(|w| w.im == 0.0) && self.eigenvalues.iter().all(|l| l.im == 0.0) {
            // real function of a Hermitian matrix
            return Ok(hermitian_part(&out));
        }
        Ok(out)
    }
}

/// Principal argument normalized to (−π, π].
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        a
    }
}

/// Deflation threshold for the Schur iteration. Machine epsilon itself can stall
/// on near-scalar input such as the group commutator of an exact pair.
const SCHUR_EPS: f64 = 1e-15;

/// Eigenvalues and eigenvectors of a unitary matrix.
///
/// The complex Schur iteration is tried first. It can stall on cyclic
/// permutations (every Wilkinson shift is equidistant from the spectrum) and on
/// near-scalar matrices, so the fallback rotates the spectrum away from −1 and
/// diagonalizes the Hermitian Cayley image i(I − W)(I + W)⁻¹ instead.
fn unitary_eigen(a: &CMatrix, max_iter: usize) -> Result<(Vec<C64>, CMatrix)> {
    let n = a.nrows();
    if let Some(schur) = Schur::try_new(a.clone(), SCHUR_EPS, max_iter) {
        let (q, t) = schur.unpack();
        return Ok(((0..n).map(|j| t[(j, j)]).collect(), q));
    }
    cayley_eigen(a, max_iter)
}

fn cayley_eigen(a: &CMatrix, max_iter: usize) -> Result<(Vec<C64>, CMatrix)> {
    let n = a.nrows();
    // cos of the eigenangles; ±acos covers every eigenvalue, so the midpoint of
    // the widest gap between those candidates avoids the whole spectrum.
    let re = SymmetricEigen::try_new(hermitian_part(a), f64::EPSILON, max_iter)
        .ok_or(Error::NoConvergence)?;
    let tau = 2.0 * std::f64::consts::PI;
    let mut angles: Vec<f64> = re
        .eigenvalues
        .iter()
        .flat_map(|&c| {
            let t = c.clamp(-1.0, 1.0).acos();
            [t, (tau - t) % tau]
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let mut best = (
        angles[0] + tau - angles[angles.len() - 1],
        angles[angles.len() - 1],
    );
    for w in angles.windows(2) {
        if w[1] - w[0] > best.0 {
            best = (w[1] - w[0], w[0]);
        }
    }
    let gap_mid = best.1 + best.0 / 2.0;
    let rot = C64::from_polar(1.0, std::f64::consts::PI - gap_mid);
    let w = a * rot;
    let id = identity(n);
    let m = (&id + &w)
        .lu()
        .solve(&(&id - &w))
        .ok_or(Error::NoConvergence)?
        * c64(0.0, 1.0);
    let eig = SymmetricEigen::try_new(hermitian_part(&m), f64::EPSILON, max_iter)
        .ok_or(Error::NoConvergence)?;
    let values = eig
        .eigenvalues
        .iter()
        .map(|&x| c64(1.0, x) / c64(1.0, -x) * rot.conj())
        .collect();
    Ok((values, eig.eigenvectors))
}

pub fn eig_normal(
    a: &CMatrix,
    kind: NormalKind,
    tol: &Tolerances,
) -> Result<SpectralDecomposition> {
    let n = ensure_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let scale = op_norm(a);
    let normality = match kind {
        NormalKind::Hermitian => op_norm(&(a - a.adjoint())),
        NormalKind::Unitary => unitarity_residual(a),
    };
    let allowed = match kind {
        NormalKind::Hermitian => tol.normality_tol * scale.max(f64::MIN_POSITIVE),
        NormalKind::Unitary => tol.normality_tol,
    };
    if normality > allowed {
        return Err(Error::NotNormal {
            kind: kind.name(),
            residual: normality,
        });
    }
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: vec![],
            eigenvectors: a.clone(),
        });
    }

    let max_iter = MAX_SWEEPS_PER_DIM * n.max(4);
    let (values, vectors) = match kind {
        NormalKind::Hermitian => {
            let eig = SymmetricEigen::try_new(hermitian_part(a), f64::EPSILON, max_iter)
                .ok_or(Error::NoConvergence)?;
            let values: Vec<C64> = eig.eigenvalues.iter().map(|&x| c64(x, 0.0)).collect();
            (values, eig.eigenvectors)
        }
        NormalKind::Unitary => unitary_eigen(a, max_iter)?,
    };

    let mut order: Vec<usize> = (0..n).collect();
    match kind {
        NormalKind::Hermitian => order.sort_by(|&i, &j| values[i].re.total_cmp(&values[j].re)),
        NormalKind::Unitary => {
            order.sort_by(|&i, &j| principal_arg(values[i]).total_cmp(&principal_arg(values[j])))
        }
    }
    let eigenvalues: Vec<C64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    let dec = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };

    let residual = op_norm(&(dec.reconstruct() - a));
    if residual > tol.eig_tol * scale.max(1e-300) && residual > 1e-14 {
        return Err(Error::NotNormal {
            kind: kind.name(),
            residual,
        });
    }
    Ok(dec)
}

/// V diag(f(λ)) V* for a normal matrix.
pub fn func_calc<F>(a: &CMatrix, kind: NormalKind, f: F, tol: &Tolerances) -> Result<CMatrix>
where
    F: Fn(C64) -> Option<C64>,
{
    eig_normal(a, kind, tol)?.apply(f)
}

/// exp(i·s·H) for Hermitian H.
pub fn exp_i_hermitian(h: &CMatrix, s: f64, tol: &Tolerances) -> Result<CMatrix> {
    func_calc(
        h,
        NormalKind::Hermitian,
        |x| Some(C64::from_polar(1.0, s * x.re)),
        tol,
    )
}

/// exp(Ω) for skew-Hermitian Ω, through the Hermitian matrix −iΩ.
pub fn exp_skew(omega: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let h = hermitian_part(&(omega * c64(0.0, -1.0)));
    exp_i_hermitian(&h, 1.0, tol)
}

/// Cayley transform (I − Ω/2)⁻¹(I + Ω/2) of a skew-Hermitian Ω; unitary by construction.
pub fn cayley(omega: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(omega)?;
    let half = omega * c64(0.5, 0.0);
    let lhs = identity(n) - &half;
    let rhs = identity(n) + half;
    lhs.lu().solve(&rhs).ok_or(Error::NoConvergence)
}

/// Nearest unitary in operator norm (unitary polar factor).
pub fn polar_unitary(a: &CMatrix) -> CMatrix {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    u * v_t
}
