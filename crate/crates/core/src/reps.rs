//! Exact finite-dimensional representations of rational rotation algebras.
//!
//! Convention: with u₁ = shift and u₂ = clock^p, u₂u₁ = e^{2πip/q}u₁u₂, i.e.
//! v_k v_j = e^{2πiθ_{j,k}} v_j v_k for j < k throughout the crate.

use num::BigRational;

use crate::error::{Error, Result};
use crate::linalg::{c64, identity, kron, CMatrix, C64};
use crate::phase::{big_one_hot, rational_rank, PhaseMatrix, RationalPhase};
use crate::tuple::UnitaryTuple;

/// e^{2πik/q}, exact at multiples of a quarter turn.
pub fn root_of_unity(k: i64, q: u64) -> C64 {
    let q_i = q as i64;
    let k = k.rem_euclid(q_i);
    if (4 * k) % q_i == 0 {
        return match 4 * k / q_i {
            0 => c64(1.0, 0.0),
            1 => c64(0.0, 1.0),
            2 => c64(-1.0, 0.0),
            _ => c64(0.0, -1.0),
        };
    }
    let angle = 2.0 * std::f64::consts::PI * (k as f64) / (q as f64);
    c64(angle.cos(), angle.sin())
}

/// diag(ω^{0·p}, ω^{1·p}, …, ω^{(q−1)p}) with ω = e^{2πi/q}.
pub fn clock_matrix(q: u64, p: i64) -> CMatrix {
    let n = q as usize;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[(j, j)] = root_of_unity(p * j as i64, q);
    }
    m
}

/// Cyclic shift S·e_j = e_{j+1 mod q}.
pub fn shift_matrix(q: u64) -> CMatrix {
    let n = q as usize;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        m[((j + 1) % n, j)] = c64(1.0, 0.0);
    }
    m
}

/// (shift(q)⊗I_m, clock(q,p)⊗I_m), satisfying u₂u₁ = e^{2πip/q}u₁u₂.
pub fn rational_pair_rep(theta: RationalPhase, multiplicity: usize) -> UnitaryTuple {
    let q = theta.q();
    let ones = identity(multiplicity.max(1));
    let u1 = kron(&shift_matrix(q), &ones);
    let u2 = kron(&clock_matrix(q, theta.p() as i64), &ones);
    UnitaryTuple::from_matrices(vec![u1, u2]).expect("pair rep has a shared dimension")
}

/// Defect-free three-generator representation of dimension q₁₂·q₁₃·q₂₃·multiplicity.
pub fn rational_torus3_rep(theta: &PhaseMatrix, multiplicity: usize) -> Result<UnitaryTuple> {
    if theta.n() != 3 {
        return Err(Error::LengthMismatch {
            expected: 3,
            got: theta.n(),
        });
    }
    let t12 = theta.rational_entry(0, 1)?;
    let t13 = theta.rational_entry(0, 2)?;
    let t23 = theta.rational_entry(1, 2)?;
    let (a, b, c) = (t12.q(), t13.q(), t23.q());
    let (ia, ib, ic) = (
        identity(a as usize),
        identity(b as usize),
        identity(c as usize),
    );
    let ones = identity(multiplicity.max(1));

    let v1 = kron(&kron(&kron(&shift_matrix(a), &shift_matrix(b)), &ic), &ones);
    let v2 = kron(
        &kron(
            &kron(&clock_matrix(a, t12.p() as i64), &ib),
            &shift_matrix(c),
        ),
        &ones,
    );
    let v3 = kron(
        &kron(
            &kron(&ia, &clock_matrix(b, t13.p() as i64)),
            &clock_matrix(c, t23.p() as i64),
        ),
        &ones,
    );
    UnitaryTuple::from_matrices(vec![v1, v2, v3])
}

/// Representation for any rational Θ with n ∈ {2, 3}.
pub fn rational_rep(theta: &PhaseMatrix, multiplicity: usize) -> Result<UnitaryTuple> {
    match theta.n() {
        2 => Ok(rational_pair_rep(theta.rational_entry(0, 1)?, multiplicity)),
        3 => rational_torus3_rep(theta, multiplicity),
        n => Err(Error::InvalidPhase(format!(
            "exact representations are built for n = 2 or 3, got {n}"
        ))),
    }
}

/// The canonical trace of the monomial u₁^{l₁}⋯u_n^{l_n}: 1 for the unit, 0 otherwise.
pub fn canonical_trace(theta: &PhaseMatrix, exponents: &[i64]) -> Result<C64> {
    if exponents.len() != theta.n() {
        return Err(Error::LengthMismatch {
            expected: theta.n(),
            got: exponents.len(),
        });
    }
    Ok(if exponents.iter().all(|&l| l == 0) {
        c64(1.0, 0.0)
    } else {
        c64(0.0, 0.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    Nondegenerate,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct NondegeneracyResult {
    pub verdict: Degeneracy,
    /// dim_ℚ span_ℚ(1, θ₁₂, θ₁₃, θ₂₃)
    pub rational_dimension: usize,
}

/// Θ (3×3) is non-degenerate iff dim_ℚ span(1, θ₁₂, θ₁₃, θ₂₃) ≥ 3, decided in exact arithmetic.
pub fn nondegeneracy_check(theta: &PhaseMatrix) -> Result<NondegeneracyResult> {
    if theta.n() != 3 {
        return Err(Error::LengthMismatch {
            expected: 3,
            got: theta.n(),
        });
    }
    let exact = theta.exact().ok_or(Error::MissingExactData)?;
    let width = exact.basis.len();
    let mut rows: Vec<Vec<BigRational>> = vec![big_one_hot(width, 0)];
    for (j, k) in [(0, 1), (0, 2), (1, 2)] {
        rows.push(
            theta
                .exact_coeffs(j, k)
                .ok_or(Error::MissingExactData)?
                .to_vec(),
        );
    }
    let rank = rational_rank(&rows);
    let verdict = if rank >= 3 {
        Degeneracy::Nondegenerate
    } else {
        Degeneracy::Degenerate
    };
    Ok(NondegeneracyResult {
        verdict,
        rational_dimension: rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, normalized_trace, op_norm, phase};
    use crate::phase::ExactPhases;
    use num::BigInt;

    fn r(s: &str) -> RationalPhase {
        s.parse().unwrap()
    }

    fn rel_defect(vj: &CMatrix, vk: &CMatrix, t: f64) -> f64 {
        op_norm(&(vk * vj - vj * vk * phase(t)))
    }

    #[test]
    fn clock_examples() {
        assert_eq!(clock_matrix(2, 1), diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]));
        assert_eq!(
            clock_matrix(4, 2),
            diag(&[c64(1.0, 0.0), c64(-1.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0)])
        );
        let c3 = clock_matrix(3, 1);
        assert!((c3[(1, 1)] - phase(1.0 / 3.0)).norm() < 1e-15);
        assert!((c3[(2, 2)] - phase(2.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn shift_examples() {
        let s2 = shift_matrix(2);
        assert_eq!(
            s2,
            CMatrix::from_row_slice(
                2,
                2,
                &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]
            )
        );
        let s3 = shift_matrix(3);
        assert_eq!(s3[(1, 0)], c64(1.0, 0.0));
        assert_eq!(s3[(2, 1)], c64(1.0, 0.0));
        assert_eq!(s3[(0, 2)], c64(1.0, 0.0));
        let s5 = shift_matrix(5);
        assert_eq!(crate::tuple::unitary_power(&s5, 5), identity(5));
    }

    #[test]
    fn clock_shift_exchange_identity() {
        for q in 1..=16u64 {
            for p in 0..q as i64 {
                let z = clock_matrix(q, p);
                let s = shift_matrix(q);
                let d = op_norm(&(&z * &s - &s * &z * root_of_unity(p, q)));
                assert!(d <= 1e-14, "q={q} p={p} defect {d}");
            }
        }
    }

    #[test]
    fn pair_rep_examples() {
        let t = rational_pair_rep(r("1/2"), 1);
        assert_eq!(t.get(0), &shift_matrix(2));
        assert_eq!(t.get(1), &diag(&[c64(1.0, 0.0), c64(-1.0, 0.0)]));
        assert_eq!(t.get(1) * t.get(0), -(t.get(0) * t.get(1)));

        let t = rational_pair_rep(r("1/3"), 1);
        assert!(rel_defect(t.get(0), t.get(1), 1.0 / 3.0) <= 1e-14);

        let t = rational_pair_rep(r("0/1"), 4);
        assert_eq!(t.dim(), 4);
        assert_eq!(t.get(0), &identity(4));
        assert_eq!(t.get(1), &identity(4));
    }

    #[test]
    fn pair_rep_monomial_traces_match_canonical_trace() {
        for (p, q, m) in [(1, 3, 1), (2, 5, 2), (3, 7, 1), (1, 2, 3)] {
            let theta = r(&format!("{p}/{q}"));
            let t = rational_pair_rep(theta, m);
            let pm = PhaseMatrix::rational(2, &[theta]).unwrap();
            for l1 in -q..=q {
                for l2 in -q..=q {
                    let tr = normalized_trace(&t.monomial(&[l1, l2]).unwrap()).unwrap();
                    if l1.rem_euclid(q) != 0 || l2.rem_euclid(q) != 0 {
                        let canon = canonical_trace(&pm, &[l1, l2]).unwrap();
                        assert!((tr - canon).norm() <= 1e-12);
                    } else {
                        assert!((tr.norm() - 1.0).abs() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn torus3_examples() {
        let pm = PhaseMatrix::rational(3, &[r("1/2"), r("0/1"), r("0/1")]).unwrap();
        let t = rational_torus3_rep(&pm, 1).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.get(2), &identity(2));

        let pm = PhaseMatrix::rational(3, &[r("1/2"), r("1/3"), r("1/5")]).unwrap();
        let t = rational_torus3_rep(&pm, 1).unwrap();
        assert_eq!(t.dim(), 30);
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let th = pm.theta(j, k);
            assert!(rel_defect(t.get(j), t.get(k), th) <= 1e-13);
            // reverse order: v_j v_k = e^{−2πiθ} v_k v_j
            let d = op_norm(&(t.get(j) * t.get(k) - t.get(k) * t.get(j) * phase(-th)));
            assert!(d <= 1e-13);
        }

        let pm = PhaseMatrix::rational(3, &[r("0/1"), r("0/1"), r("0/1")]).unwrap();
        let t = rational_torus3_rep(&pm, 2).unwrap();
        assert_eq!(t.dim(), 2);
        for j in 0..3 {
            assert_eq!(t.get(j), &identity(2));
        }
    }

    #[test]
    fn torus3_refuses_irrational_entries() {
        let pm = PhaseMatrix::from_upper(3, &[0.5, 0.25, 0.1]).unwrap();
        assert!(matches!(
            rational_torus3_rep(&pm, 1),
            Err(Error::NotRational { .. })
        ));
    }

    #[test]
    fn canonical_trace_examples() {
        let pm = PhaseMatrix::from_upper(3, &[0.3, 0.1, 0.7]).unwrap();
        assert_eq!(canonical_trace(&pm, &[0, 0, 0]).unwrap(), c64(1.0, 0.0));
        assert_eq!(canonical_trace(&pm, &[1, 0, 0]).unwrap(), c64(0.0, 0.0));
        assert_eq!(canonical_trace(&pm, &[2, -3, 5]).unwrap(), c64(0.0, 0.0));
        assert!(matches!(
            canonical_trace(&pm, &[1, 0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn nondegeneracy_families() {
        let pm = PhaseMatrix::rational(3, &[r("1/2"), r("1/3"), r("1/5")]).unwrap();
        let res = nondegeneracy_check(&pm).unwrap();
        assert_eq!(
            (res.verdict, res.rational_dimension),
            (Degeneracy::Degenerate, 1)
        );

        let s2 = 2f64.sqrt();
        let s3 = 3f64.sqrt();
        let pm = PhaseMatrix::from_upper(3, &[s2 - 1.0, s3 - 1.0, 0.5])
            .unwrap()
            .with_exact(ExactPhases {
                basis: vec!["1".into(), "sqrt2".into(), "sqrt3".into()],
                values: vec![1.0, s2, s3],
                coeffs: vec![
                    vec![big(-1, 1), big(1, 1), big(0, 1)],
                    vec![big(-1, 1), big(0, 1), big(1, 1)],
                    vec![big(1, 2), big(0, 1), big(0, 1)],
                ],
            })
            .unwrap();
        let res = nondegeneracy_check(&pm).unwrap();
        assert_eq!(
            (res.verdict, res.rational_dimension),
            (Degeneracy::Nondegenerate, 3)
        );

        let row = vec![big(-1, 1), big(1, 1)];
        let pm = PhaseMatrix::from_upper(3, &[s2 - 1.0; 3])
            .unwrap()
            .with_exact(ExactPhases {
                basis: vec!["1".into(), "sqrt2".into()],
                values: vec![1.0, s2],
                coeffs: vec![row.clone(), row.clone(), row],
            })
            .unwrap();
        let res = nondegeneracy_check(&pm).unwrap();
        assert_eq!(
            (res.verdict, res.rational_dimension),
            (Degeneracy::Degenerate, 2)
        );
    }

    #[test]
    fn nondegeneracy_needs_exact_data() {
        let pm = PhaseMatrix::from_upper(3, &[0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            nondegeneracy_check(&pm),
            Err(Error::MissingExactData)
        ));
    }
}
