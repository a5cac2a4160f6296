use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::search::{bott_index_triple, voiculescu_triple};

/// One spin-triple size. Pair columns are ordered (1,2), (1,3), (2,3).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub n: usize,
    pub bott_index: Option<i64>,
    pub spectral_gap: Option<f64>,
    pub commutator_12: f64,
    pub commutator_13: f64,
    pub commutator_23: f64,
    pub defect_12: Option<f64>,
    pub defect_13: Option<f64>,
    pub defect_23: Option<f64>,
    pub exel_12: Option<f64>,
    pub exel_13: Option<f64>,
    pub exel_23: Option<f64>,
    pub note: Option<String>,
}

fn row(n: usize, tol: &Tolerances) -> Result<CounterexampleRow> {
    let [h1, h2, h3] = voiculescu_triple(n)?;
    let comm = |a: &crate::CMatrix, b: &crate::CMatrix| crate::linalg::op_norm(&(a * b - b * a));
    let commutators = [comm(&h1, &h2), comm(&h1, &h3), comm(&h2, &h3)];
    match bott_index_triple(&h1, &h2, &h3, tol) {
        Ok(c) => Ok(CounterexampleRow {
            n,
            bott_index: Some(c.bott_index_triple),
            spectral_gap: Some(c.spectral_gap),
            commutator_12: c.commutator_norms[0],
            commutator_13: c.commutator_norms[1],
            commutator_23: c.commutator_norms[2],
            defect_12: Some(c.pairwise_defects[0]),
            defect_13: Some(c.pairwise_defects[1]),
            defect_23: Some(c.pairwise_defects[2]),
            exel_12: c.pairwise_exel[0],
            exel_13: c.pairwise_exel[1],
            exel_23: c.pairwise_exel[2],
            note: c
                .pairwise_exel
                .iter()
                .any(Option::is_none)
                .then(|| "commutator spectrum meets the cut at −1".into()),
        }),
        Err(e @ Error::NoSpectralGap(_)) => Ok(CounterexampleRow {
            n,
            bott_index: None,
            spectral_gap: None,
            commutator_12: commutators[0],
            commutator_13: commutators[1],
            commutator_23: commutators[2],
            defect_12: None,
            defect_13: None,
            defect_23: None,
            exel_12: None,
            exel_13: None,
            exel_23: None,
            note: Some(e.to_string()),
        }),
        Err(e) => Err(e),
    }
}

/// Spin triples for every n in `n_min..=n_max`.
pub fn counterexample_sweep(
    n_min: usize,
    n_max: usize,
    tol: &Tolerances,
) -> Result<Vec<CounterexampleRow>> {
    if n_min < 2 || n_max < n_min {
        return Err(Error::ParamViolation(format!(
            "need 2 ≤ n_min ≤ n_max, got {n_min}..{n_max}"
        )));
    }
    let pool = super::thread_pool()?;
    pool.install(|| {
        (n_min..=n_max)
            .into_par_iter()
            .map(|n| row(n, tol))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep() {
        let rows = counterexample_sweep(2, 12, &Tolerances::default()).unwrap();
        assert_eq!(rows.len(), 11);
        for r in &rows {
            assert_eq!(r.bott_index, Some(1), "n = {}", r.n);
            let bound = 2.0 / (r.n as f64 - 1.0);
            assert!(r.commutator_12 <= bound * (1.0 + 1e-12));
        }
        let r2 = &rows[0];
        assert!(r2.exel_12.is_none() && r2.note.is_some());
        for r in rows.iter().filter(|r| r.n >= 8) {
            for e in [r.exel_12, r.exel_13, r.exel_23] {
                assert!(e.unwrap().abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn rejects_bad_range() {
        assert!(counterexample_sweep(1, 3, &Tolerances::default()).is_err());
        assert!(counterexample_sweep(5, 3, &Tolerances::default()).is_err());
    }
}
