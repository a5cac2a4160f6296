//! Phase data Θ = (θ_{j,k}) for rotation relations v_k v_j = e^{2πiθ_{j,k}} v_j v_k.
//!
//! Entries live in [0, 1). The lower triangle is always derived from the upper
//! one, θ_{k,j} = (1 − θ_{j,k}) mod 1. Optional exact data expresses each upper
//! entry as a rational combination of a declared basis of reals that the caller
//! asserts to be ℚ-linearly independent; basis element 0 is the constant 1.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EXACT_EVAL_TOL: f64 = 1e-12;

/// Reduced fraction p/q with 0 ≤ p < q. Serialized as the string "p/q".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RationalPhase {
    p: u64,
    q: u64,
}

impl RationalPhase {
    /// Reduces p modulo q and to lowest terms.
    pub fn new(p: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidPhase("denominator must be positive".into()));
        }
        let p = p.rem_euclid(q as i64) as u64;
        let g = p.gcd(&q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn zero() -> Self {
        Self { p: 0, q: 1 }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    fn to_big(self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.q))
    }
}

impl fmt::Display for RationalPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalPhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let p: i64 = num
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        let q: u64 = den
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational '{s}'")))?;
        RationalPhase::new(p, q)
    }
}

impl TryFrom<String> for RationalPhase {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RationalPhase> for String {
    fn from(r: RationalPhase) -> String {
        r.to_string()
    }
}

/// Exact coefficient data for the upper-triangular entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPhases {
    pub basis: Vec<String>,
    pub values: Vec<f64>,
    /// One coefficient vector per pair j<k, row-major over the upper triangle.
    pub coeffs: Vec<Vec<BigRational>>,
}

impl ExactPhases {
    fn rational_only(entries: &[RationalPhase]) -> Self {
        Self {
            basis: vec!["1".into()],
            values: vec![1.0],
            coeffs: entries.iter().map(|r| vec![r.to_big()]).collect(),
        }
    }

    fn evaluate(&self, idx: usize) -> f64 {
        self.coeffs[idx]
            .iter()
            .zip(&self.values)
            .map(|(c, v)| c.to_f64().unwrap_or(f64::NAN) * v)
            .sum()
    }
}

/// Numeric value of a basis symbol: "1", a decimal literal, "sqrtK", "sqrt(K)", "√K", "pi", "e".
pub fn basis_value(name: &str) -> Option<f64> {
    let s = name.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    match s {
        "pi" | "π" => return Some(std::f64::consts::PI),
        "e" => return Some(std::f64::consts::E),
        _ => {}
    }
    let radicand = s
        .strip_prefix("sqrt")
        .or_else(|| s.strip_prefix('√'))
        .map(|r| r.trim_start_matches('(').trim_end_matches(')'))?;
    radicand
        .parse::<f64>()
        .ok()
        .filter(|x| *x >= 0.0)
        .map(f64::sqrt)
}

/// Number of strictly upper-triangular entries.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Pairs (j, k) with j < k in row-major order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |j| (j + 1..n).map(move |k| (j, k)))
}

fn pair_index(n: usize, j: usize, k: usize) -> usize {
    debug_assert!(j < k && k < n);
    j * n - j * (j + 1) / 2 + (k - j - 1)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMatrix {
    n: usize,
    theta: Vec<Vec<f64>>,
    exact: Option<ExactPhases>,
}

impl PhaseMatrix {
    /// Builds Θ from its upper-triangular entries θ_{j,k}, j<k, in row-major order.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPhase("need at least two generators".into()));
        }
        if upper.len() != pair_count(n) {
            return Err(Error::LengthMismatch {
                expected: pair_count(n),
                got: upper.len(),
            });
        }
        let mut theta = vec![vec![0.0; n]; n];
        for ((j, k), &t) in pairs(n).zip(upper) {
            if !(t.is_finite() && (0.0..1.0).contains(&t)) {
                return Err(Error::InvalidPhase(format!(
                    "θ[{j}][{k}] = {t} is outside [0, 1)"
                )));
            }
            theta[j][k] = t;
            theta[k][j] = if t == 0.0 { 0.0 } else { 1.0 - t };
        }
        Ok(Self {
            n,
            theta,
            exact: None,
        })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::from_upper(n, &vec![0.0; pair_count(n.max(2))])
    }

    /// Θ with every upper entry an exact rational.
    pub fn rational(n: usize, upper: &[RationalPhase]) -> Result<Self> {
        let values: Vec<f64> = upper.iter().map(RationalPhase::value).collect();
        let mut pm = Self::from_upper(n, &values)?;
        pm.exact = Some(ExactPhases::rational_only(upper));
        Ok(pm)
    }

    /// Attaches exact data, checking it evaluates to the stored entries modulo 1.
    pub fn with_exact(mut self, exact: ExactPhases) -> Result<Self> {
        let b = exact.basis.len();
        if b == 0 || exact.values.len() != b {
            return Err(Error::InvalidPhase(
                "basis and basis values must be non-empty and aligned".into(),
            ));
        }
        if (exact.values[0] - 1.0).abs() > 0.0 {
            return Err(Error::InvalidPhase(
                "basis element 0 must be the constant 1".into(),
            ));
        }
        if exact.coeffs.len() != pair_count(self.n) {
            return Err(Error::LengthMismatch {
                expected: pair_count(self.n),
                got: exact.coeffs.len(),
            });
        }
        for (idx, (j, k)) in pairs(self.n).enumerate() {
            if exact.coeffs[idx].len() != b {
                return Err(Error::LengthMismatch {
                    expected: b,
                    got: exact.coeffs[idx].len(),
                });
            }
            let v = exact.evaluate(idx);
            let gap = circular_distance(v, self.theta[j][k]);
            if gap.is_nan() || gap > EXACT_EVAL_TOL {
                return Err(Error::InvalidPhase(format!(
                    "exact value of θ[{j}][{k}] evaluates to {v}, stored {}",
                    self.theta[j][k]
                )));
            }
        }
        self.exact = Some(exact);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// θ_{j,k} (0-based indices).
    pub fn theta(&self, j: usize, k: usize) -> f64 {
        self.theta[j][k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.theta
    }

    pub fn upper(&self) -> Vec<f64> {
        pairs(self.n).map(|(j, k)| self.theta[j][k]).collect()
    }

    pub fn exact(&self) -> Option<&ExactPhases> {
        self.exact.as_ref()
    }

    /// Exact coefficient vector of θ_{j,k} for j<k.
    pub fn exact_coeffs(&self, j: usize, k: usize) -> Option<&[BigRational]> {
        self.exact
            .as_ref()
            .map(|e| e.coeffs[pair_index(self.n, j, k)].as_slice())
    }

    /// θ_{j,k} as a reduced fraction when its exact data involves only the constant basis element.
    pub fn rational_entry(&self, j: usize, k: usize) -> Result<RationalPhase> {
        let (a, b) = if j < k { (j, k) } else { (k, j) };
        let coeffs = self
            .exact_coeffs(a, b)
            .ok_or(Error::NotRational { row: j, col: k })?;
        if coeffs.iter().skip(1).any(|c| !c.is_zero()) {
            return Err(Error::NotRational { row: j, col: k });
        }
        let c = &coeffs[0];
        let den = c
            .denom()
            .to_u64()
            .ok_or(Error::NotRational { row: j, col: k })?;
        let num = c
            .numer()
            .mod_floor(c.denom())
            .to_i64()
            .ok_or(Error::NotRational { row: j, col: k })?;
        let r = RationalPhase::new(num, den)?;
        Ok(if j < k {
            r
        } else {
            RationalPhase::new(-(r.p() as i64), r.q())?
        })
    }

    pub fn to_json_value(&self) -> PhaseMatrixJson {
        PhaseMatrixJson {
            n: self.n,
            theta: self.theta.clone(),
            exact: self.exact.as_ref().map(|e| ExactJson {
                basis: e.basis.clone(),
                values: Some(e.values.clone()),
                coeffs: e
                    .coeffs
                    .iter()
                    .map(|v| v.iter().map(rational_pair).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
                    .expect("exact coefficients fit in i64"),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("phase json serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PhaseMatrixJson =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.into_phase()
    }
}

fn rational_pair(c: &BigRational) -> Result<[i64; 2]> {
    let num = c
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Parse("numerator overflows i64".into()))?;
    let den = c
        .denom()
        .to_i64()
        .ok_or_else(|| Error::Parse("denominator overflows i64".into()))?;
    Ok([num, den])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhaseMatrixJson {
    pub n: usize,
    pub theta: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactJson {
    pub basis: Vec<String>,
    /// Numeric basis values; derived from the symbol names when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    pub coeffs: Vec<Vec<[i64; 2]>>,
}

impl PhaseMatrixJson {
    pub fn into_phase(self) -> Result<PhaseMatrix> {
        let n = self.n;
        if self.theta.len() != n || self.theta.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidPhase(format!("theta must be {n}x{n}")));
        }
        for j in 0..n {
            if self.theta[j][j] != 0.0 {
                return Err(Error::InvalidPhase(format!("θ[{j}][{j}] must be 0")));
            }
        }
        let upper: Vec<f64> = pairs(n).map(|(j, k)| self.theta[j][k]).collect();
        let pm = PhaseMatrix::from_upper(n, &upper)?;
        for (j, k) in pairs(n) {
            let t = self.theta[j][k];
            let back = self.theta[k][j];
            let skew_ok = if t == 0.0 {
                back == 0.0
            } else {
                circular_distance(t + back, 0.0) <= EXACT_EVAL_TOL
            };
            if !skew_ok || !(0.0..1.0).contains(&back) {
                return Err(Error::InvalidPhase(format!(
                    "θ[{k}][{j}] = {back} is not the skew partner of {t}"
                )));
            }
        }
        let Some(ex) = self.exact else { return Ok(pm) };
        let values = match ex.values {
            Some(v) => v,
            None => ex
                .basis
                .iter()
                .map(|b| {
                    basis_value(b)
                        .ok_or_else(|| Error::Parse(format!("cannot evaluate basis symbol '{b}'")))
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let coeffs = ex
            .coeffs
            .iter()
            .map(|v| {
                v.iter()
                    .map(|&[num, den]| {
                        if den == 0 {
                            Err(Error::Parse("zero denominator in exact data".into()))
                        } else {
                            Ok(BigRational::new(BigInt::from(num), BigInt::from(den)))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        pm.with_exact(ExactPhases {
            basis: ex.basis,
            values,
            coeffs,
        })
    }
}

/// Rank over ℚ of a rational matrix by fraction-exact Gaussian elimination.
pub fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.iter().map(Vec::len).max().unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r].get(col).is_some_and(|x| !x.is_zero()))
        else {
            continue;
        };
        m.swap(rank, pivot);
        let pivot_row = m[rank].clone();
        let inv = pivot_row[col].recip();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row.get(col).is_none_or(|x| x.is_zero()) {
                continue;
            }
            let factor = &row[col] * &inv;
            for c in col..ncols {
                let delta = &factor * &pivot_row[c];
                row[c] -= delta;
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

pub(crate) fn big_one_hot(len: usize, idx: usize) -> Vec<BigRational> {
    (0..len)
        .map(|i| {
            if i == idx {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect()
}
