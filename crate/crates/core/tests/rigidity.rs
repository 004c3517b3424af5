mod common;

use cocycle_core::linalg;
use cocycle_core::rigidity::*;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn period_two_reduction() {
    let s = full(2);
    let p = pt("(01)*.(01)*");
    let (a, b, truth) = matched_pair(&s, &p, 21);
    let unwound = reduce_to_fixed_point(&a, &b, &p, 2, HOLONOMY_TOL).unwrap();
    assert_eq!(unwound.branch(&p.shift(1)), Some(1));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<_> = (0..100).map(|_| s.random_point(&mut rng, 4, 8)).collect();
    let check = verify_cohomology(&a, &b, &unwound, &samples, 1e-7).unwrap();
    assert!(check.passed, "{check:?}");
    for z in samples.iter().take(10) {
        let v = unwound.value(z).unwrap();
        assert!(linalg::distance(&v, truth.at(z, 0)) < 1e-8);
        let homoclinic = s.homoclinic_approximant(z, &p, 3).unwrap();
        assert!(unwound.wrap_around_residual(&homoclinic).unwrap() < 1e-9);
    }
}

#[test]
fn reduction_with_period_one_is_the_fixed_point_pipeline() {
    let s = full(2);
    let x = default_anchor(&s);
    let (a, b, _) = matched_pair(&s, &x, 22);
    let unwound = reduce_to_fixed_point(&a, &b, &x, 1, HOLONOMY_TOL).unwrap();
    let ev = ConjugacyEvaluator::new(a.clone(), b.clone(), x, HOLONOMY_TOL).unwrap();
    let z = pt("(011)*.(011)*");
    assert!(linalg::distance(&unwound.value(&z).unwrap(), &ev.value(&z).unwrap()) < 1e-12);
    assert!(reduce_to_fixed_point(&a, &b, &z, 2, HOLONOMY_TOL).is_err());
}

#[test]
fn extension_to_a_period_three_point() {
    let s = full(2);
    let x = default_anchor(&s);
    let (a, b, _) = matched_pair(&s, &x, 23);
    let ev = ConjugacyEvaluator::new(a.clone(), b.clone(), x.clone(), HOLONOMY_TOL).unwrap();
    let z = pt("(011)*.(011)*");
    let pz = ev.conjugacy_extended(&z).unwrap();
    let pfz = ev.conjugacy_extended(&z.shift(1)).unwrap();
    let rhs = pfz * b.evaluate(&z) * linalg::inverse(&pz).unwrap();
    assert!(linalg::relative_distance(&a.evaluate(&z), &rhs) < 1e-7);
    assert_eq!(ev.conjugacy_extended(&x).unwrap(), linalg::identity(2));
}

#[test]
fn identity_conjugacy_fails_on_twisted_pair() {
    let s = full(2);
    let x = default_anchor(&s);
    let (a, b, p) = matched_pair(&s, &x, 24);
    let samples: Vec<_> = s.enumerate_periodic(3).unwrap();
    let bad = verify_cohomology(&a, &b, &IdentityConjugacy(2), &samples, 1e-6).unwrap();
    assert!(bad.max_residual > 1e-3);
    let good = verify_cohomology(&a, &b, &p, &samples, 1e-6).unwrap();
    assert!(good.max_residual < 1e-12);
    let trivial = verify_cohomology(&a, &a, &IdentityConjugacy(2), &samples, 1e-6).unwrap();
    assert_eq!(trivial.max_residual, 0.0);
}

#[test]
fn lipschitz_estimate_stays_bounded() {
    let s = full(2);
    let x = default_anchor(&s);
    let (a, b, _) = matched_pair(&s, &x, 25);
    let ev = ConjugacyEvaluator::new(a.clone(), b, x.clone(), HOLONOMY_TOL).unwrap();
    let small = lipschitz_estimate(&ev, 200, 1).unwrap();
    let large = lipschitz_estimate(&ev, 2000, 1).unwrap();
    assert!(large.l_hat >= small.l_hat);
    assert!(large.l_hat < 2.0 * small.l_hat.max(1e-12) + 1.0);
    let same = ConjugacyEvaluator::new(a.clone(), a, x, HOLONOMY_TOL).unwrap();
    assert!(lipschitz_estimate(&same, 200, 2).unwrap().l_hat < 1e-8);
}

#[test]
fn perturbed_pair_is_detected() {
    let s = full(2);
    let x = default_anchor(&s);
    let (a, _, _) = matched_pair(&s, &x, 26);
    let shifted = a
        .generator()
        .map(&s, |w, m| {
            let mut m = m.clone();
            if w == [0, 1, 1] {
                m[(0, 0)] += 0.1;
            }
            m
        })
        .unwrap();
    let b = cocycle_core::Cocycle::new(s.clone(), shifted).unwrap();
    let report = periodic_data_check(&a, &b, 3, None, 1e-10).unwrap();
    assert!(!report.matched);
    assert!(report.min_failing_residual().unwrap() > 1e-3);
    let b = cocycle_core::BunchedCocycle::certify(b, 8, cocycle_core::BunchingMode::Exhaustive).unwrap();
    let ev = ConjugacyEvaluator::new(a, b, x, HOLONOMY_TOL).unwrap();
    let worst = ["(0)*.011(0)*", "(0)*1.1(0)*", "(0)*01.1011(0)*"]
        .iter()
        .map(|l| ev.su_consistency(&pt(l)).unwrap())
        .fold(0.0, f64::max);
    assert!(worst > 1e-3, "{worst}");
}
