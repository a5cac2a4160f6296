//! Property tests for the structural invariants of the toolkit.

use proptest::prelude::*;
use rand::Rng;
use rotlab_core::linalg::{
    c64, eig_normal, func_calc, normalized_trace, op_norm, phase, CMatrix, NormalKind, C64,
};
use rotlab_core::obstruction::{
    common_gap_theta, exel_rhs, obstruction_report, BranchAngle, ObstructionReport, Verdict,
};
use rotlab_core::reps::{canonical_trace, rational_pair_rep, rational_torus3_rep};
use rotlab_core::search::planted::plant_instance_stream;
use rotlab_core::search::random::{gaussian_matrix, haar_unitary, rng_for};
use rotlab_core::search::repair::{repair_outcome, SearchConfig};
use rotlab_core::search::{bott_index_triple, voiculescu_triple};
use rotlab_core::{PhaseMatrix, RationalPhase, Tolerances, UnitaryTuple};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn poly(coeffs: &[f64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(c64(0.0, 0.0), |acc, &c| acc * z + c)
}

fn rational() -> impl Strategy<Value = RationalPhase> {
    denominators(2..=9)
}

fn small_rational() -> impl Strategy<Value = RationalPhase> {
    denominators(2..=4)
}

fn denominators(qs: std::ops::RangeInclusive<u64>) -> impl Strategy<Value = RationalPhase> {
    qs.prop_flat_map(|q| (1..q as i64).prop_map(move |p| RationalPhase::new(p, q).unwrap()))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn functional_calculus_is_multiplicative(
        seed in any::<u64>(),
        n in 1usize..=16,
        p in prop::collection::vec(-1.0f64..1.0, 1..=6),
        q in prop::collection::vec(-1.0f64..1.0, 1..=6),
    ) {
        let u = haar_unitary(n, &mut rng_for(seed, 0));
        let fp = func_calc(&u, NormalKind::Unitary, |z| Some(poly(&p, z)), &tol()).unwrap();
        let fq = func_calc(&u, NormalKind::Unitary, |z| Some(poly(&q, z)), &tol()).unwrap();
        let fpq = func_calc(&u, NormalKind::Unitary, |z| Some(poly(&p, z) * poly(&q, z)), &tol()).unwrap();
        prop_assert!(op_norm(&(fpq - fp * fq)) <= 1e-9);
    }

    #[test]
    fn trace_is_conjugation_invariant(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = rng_for(seed, 0);
        let a = gaussian_matrix(n, &mut rng);
        let w = haar_unitary(n, &mut rng);
        let t0 = normalized_trace(&a).unwrap();
        let t1 = normalized_trace(&(&w * &a * w.adjoint())).unwrap();
        prop_assert!((t0 - t1).norm() <= 1e-12);
    }

    #[test]
    fn operator_norm_is_submultiplicative(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = rng_for(seed, 0);
        let a = gaussian_matrix(n, &mut rng);
        let b = gaussian_matrix(n, &mut rng);
        prop_assert!(op_norm(&(&a * &b)) <= op_norm(&a) * op_norm(&b) + 1e-10);
    }

    #[test]
    fn unitary_spectrum_on_the_circle(seed in any::<u64>(), n in 1usize..=24) {
        let u = haar_unitary(n, &mut rng_for(seed, 0));
        let dec = eig_normal(&u, NormalKind::Unitary, &tol()).unwrap();
        for z in &dec.eigenvalues {
            prop_assert!((z.norm() - 1.0).abs() <= 1e-10);
        }
        let args: Vec<f64> = dec.eigenvalues.iter().map(|z| z.arg()).collect();
        prop_assert!(args.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pair_rep_monomials_match_canonical_trace(theta in rational(), m in 1usize..=3, l1 in -9i64..=9, l2 in -9i64..=9) {
        let pm = PhaseMatrix::rational(2, &[theta]).unwrap();
        let t = rational_pair_rep(theta, m);
        let q = theta.q() as i64;
        prop_assume!(l1.rem_euclid(q) != 0 || l2.rem_euclid(q) != 0);
        let got = normalized_trace(&t.monomial(&[l1, l2]).unwrap()).unwrap();
        let want = canonical_trace(&pm, &[l1, l2]).unwrap();
        prop_assert!((got - want).norm() <= 1e-12);
    }

    #[test]
    fn torus3_skew_constraint_both_orders(a in small_rational(), b in small_rational(), c in small_rational()) {
        let pm = PhaseMatrix::rational(3, &[a, b, c]).unwrap();
        let t = rational_torus3_rep(&pm, 1).unwrap();
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let (vj, vk) = (t.get(j), t.get(k));
            let th = pm.theta(j, k);
            prop_assert!(op_norm(&(vk * vj - vj * vk * phase(th))) <= 1e-13);
            prop_assert!(op_norm(&(vj * vk - vk * vj * phase(-th))) <= 1e-13);
        }
    }

    #[test]
    fn spin_index_is_conjugation_invariant(seed in any::<u64>(), n in 2usize..=14) {
        let hs = voiculescu_triple(n).unwrap();
        let w = haar_unitary(n, &mut rng_for(seed, 0));
        let c = |h: &CMatrix| {
            let m = &w * h * w.adjoint();
            (&m + m.adjoint()) * c64(0.5, 0.0)
        };
        let a = bott_index_triple(&hs[0], &hs[1], &hs[2], &tol()).unwrap();
        let b = bott_index_triple(&c(&hs[0]), &c(&hs[1]), &c(&hs[2]), &tol()).unwrap();
        prop_assert_eq!(a.bott_index_triple, b.bott_index_triple);
    }
}

fn close(a: Option<f64>, b: Option<f64>, eps: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() <= eps,
        (None, None) => true,
        _ => false,
    }
}

fn reports_agree(a: &ObstructionReport, b: &ObstructionReport) -> bool {
    let eps = 1e-10;
    a.verdict == b.verdict
        && (a.defect_max - b.defect_max).abs() <= eps
        && (a.monomial_deviation - b.monomial_deviation).abs() <= eps
        && close(a.common_gap_theta, b.common_gap_theta, eps)
        && a.per_pair.iter().zip(&b.per_pair).all(|(p, q)| {
            (p.defect - q.defect).abs() <= eps
                && close(p.exel_rhs, q.exel_rhs, eps)
                && close(p.exel_lhs, q.exel_lhs, eps)
                && close(p.trace_condition_residual, q.trace_condition_residual, eps)
                && close(p.branch_theta, q.branch_theta, eps)
                && p.rieffel_rank == q.rieffel_rank
                && p.bott_index == q.bott_index
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn report_is_conjugation_invariant(seed in any::<u64>(), theta in rational(), noise in 0.0f64..1e-3) {
        let pm = PhaseMatrix::rational(2, &[theta]).unwrap();
        let inst = plant_instance_stream(&pm, 2, noise, seed, 0).unwrap();
        let w = haar_unitary(inst.tuple.dim(), &mut rng_for(seed, 1));
        let a = obstruction_report(&pm, &inst.tuple, 2, 1e-6, &tol()).unwrap();
        let b = obstruction_report(&pm, &inst.tuple.conjugated(&w), 2, 1e-6, &tol()).unwrap();
        prop_assert!(reports_agree(&a, &b), "{a:?}\nvs\n{b:?}");
    }

    #[test]
    fn branch_choice_does_not_matter(seed in any::<u64>(), a in small_rational(), b in small_rational(), c in small_rational()) {
        let pm = PhaseMatrix::rational(3, &[a, b, c]).unwrap();
        let inst = plant_instance_stream(&pm, 1, 1e-4, seed, 0).unwrap();
        let cg = common_gap_theta(&pm, 0.01);
        prop_assume!(cg.is_ok());
        let cg = cg.unwrap();
        for (j, k) in [(0, 1), (0, 2), (1, 2)] {
            let (u, v) = (inst.tuple.get(k), inst.tuple.get(j));
            let own = exel_rhs(u, v, BranchAngle::new(pm.theta(j, k)).unwrap(), &tol()).unwrap();
            let common = exel_rhs(u, v, cg.branch, &tol()).unwrap();
            prop_assert!((own - common).abs() <= 1e-10, "{own} vs {common}");
        }
    }
}

#[test]
fn repair_iterates_stay_unitary_and_objective_decreases() {
    let pm = PhaseMatrix::rational(
        3,
        &[
            "1/2".parse().unwrap(),
            "1/3".parse().unwrap(),
            "1/4".parse().unwrap(),
        ],
    )
    .unwrap();
    for s in 0..4 {
        let inst = plant_instance_stream(&pm, 1, 1e-3, 3, s).unwrap();
        let res = repair_outcome(&pm, &inst.tuple, &SearchConfig::default()).unwrap();
        assert!(res.converged);
        assert!(res.unitarity_residual <= 1e-10);
        assert!(res.objective_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(res.distance_moved <= 10.0 * 1e-3);
    }
}

/// Perturbed exact representations keep every residual at C·δ with C = 0 up to
/// rounding: the trace of the logarithm is quantized while the gap persists.
#[test]
fn necessity_residuals_scale_with_noise() {
    let mut worst_ratio: f64 = 0.0;
    for (i, t) in ["1/2", "1/3", "2/5", "3/7"].iter().enumerate() {
        let theta: RationalPhase = t.parse().unwrap();
        let pm = PhaseMatrix::rational(2, &[theta]).unwrap();
        for &delta in &[1e-2, 1e-3, 1e-4] {
            let inst = plant_instance_stream(&pm, 2, delta, 40 + i as u64, 0).unwrap();
            let rep = obstruction_report(&pm, &inst.tuple, 0, 1e-6, &tol()).unwrap();
            let r = rep.per_pair[0].trace_condition_residual.unwrap();
            worst_ratio = worst_ratio.max(r / delta);
        }
    }
    println!("max residual / δ = {worst_ratio:.3e}");
    assert!(worst_ratio <= 1e-8);

    for q in 3..=12u64 {
        let pm = PhaseMatrix::zero(2).unwrap();
        let t = rational_pair_rep(RationalPhase::new(1, q).unwrap(), 1);
        let rep = obstruction_report(&pm, &t, 0, 1e-6, &tol()).unwrap();
        assert!(rep.per_pair[0].trace_condition_residual.unwrap() >= 1.0 / (2 * q) as f64);
    }
}

/// Obstructed verdict with residual r: repair either fails or moves at least r/4.
#[test]
fn obstructed_instances_are_not_repaired_nearby() {
    let zero = PhaseMatrix::zero(2).unwrap();
    for q in 3..=10u64 {
        for s in 0..2 {
            let mut rng = rng_for(900 + q, s);
            let exact = rational_pair_rep(RationalPhase::new(1, q).unwrap(), 1 + s as usize);
            let w = haar_unitary(exact.dim(), &mut rng);
            let noise: f64 = rng.random_range(0.0..1e-2);
            let mats: Vec<CMatrix> = exact
                .conjugated(&w)
                .matrices()
                .iter()
                .map(|m| {
                    let x = rotlab_core::search::random::random_skew(m.nrows(), noise, &mut rng);
                    m * rotlab_core::linalg::exp_skew(&x, &tol()).unwrap()
                })
                .collect();
            let tuple = UnitaryTuple::from_matrices(mats).unwrap();
            let rep = obstruction_report(&zero, &tuple, 0, 1e-6, &tol()).unwrap();
            assert_eq!(rep.verdict, Verdict::Obstructed);
            let r = rep.per_pair[0].trace_condition_residual.unwrap();
            let res = repair_outcome(&zero, &tuple, &SearchConfig::default()).unwrap();
            assert!(
                !res.converged || res.distance_moved >= r / 4.0,
                "q = {q}: {res:?}"
            );
        }
    }
}
