mod common;

use cocycle_core::cocycle::{BunchingMode, Cocycle, WindowGenerator};
use cocycle_core::linalg;
use cocycle_core::Point;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cocycle(k: usize, dim: usize, radius: usize, seed: u64) -> Cocycle {
    let s = full(k);
    Cocycle::new(s.clone(), WindowGenerator::random_near_identity(&s, dim, radius, 0.2, seed).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn cocycle_property(seed in any::<u64>(), p in -6i64..6, q in -6i64..6, radius in 0usize..3) {
        let c = cocycle(2, 3, radius, seed);
        let x = c.space().random_point(&mut ChaCha8Rng::seed_from_u64(seed), 3, 10);
        prop_assert!(c.cocycle_property_residual(&x, p, q).unwrap() < 1e-12);
        let prod = c.iterate(&x, p).unwrap() * c.iterate_inverse(&x, p).unwrap();
        prop_assert!(linalg::distance(&prod, &linalg::identity(3)) < 1e-12);
    }

    #[test]
    fn induced_power_matches_iterates(seed in any::<u64>(), k in 1usize..4, n in 0i64..4) {
        let c = cocycle(2, 2, 1, seed);
        let ck = c.induced_power(k).unwrap();
        let x = c.space().random_point(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), 3, 10);
        let direct = c.iterate(&x, n * k as i64).unwrap();
        prop_assert!(linalg::distance(&ck.iterate(&x, n).unwrap(), &direct) < 1e-12);
        prop_assert!(linalg::distance(&ck.iterate(&x, -n).unwrap(), &c.iterate(&x, -n * k as i64).unwrap()) < 1e-12);
    }

    #[test]
    fn lipschitz_bound_holds_on_pairs(seed in any::<u64>(), radius in 0usize..3) {
        let c = cocycle(2, 2, radius, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = c.space().random_point(&mut rng, 3, 10);
        let y = c.space().random_point(&mut rng, 3, 10);
        let lhs = linalg::distance(&c.evaluate(&x), &c.evaluate(&y));
        prop_assert!(lhs <= c.lipschitz_constant() * c.space().metric(&x, &y) + 1e-12);
    }
}

#[test]
fn twist_telescopes_at_periodic_points() {
    let s = full(2);
    let a = cocycle(2, 2, 1, 3);
    let q = WindowGenerator::random_near_identity(&s, 2, 1, 0.4, 4).unwrap();
    let b = a.twist(&q).unwrap();
    for n in 1..=5 {
        for p in s.enumerate_periodic(n).unwrap() {
            // Bⁿ(p) = Q(p) Aⁿ(p) Q(p)⁻¹ because Q(fⁿp) = Q(p).
            let mut expected = linalg::identity(2);
            for j in 0..n as i64 {
                expected = a.factor(&p, j) * expected;
            }
            let expected = q.at(&p, 0) * expected * linalg::inverse(q.at(&p, 0)).unwrap();
            assert!(linalg::distance(&b.iterate(&p, n as i64).unwrap(), &expected) < 1e-12);
        }
    }
}

#[test]
fn norm_products_stay_bounded_on_local_stable_sets() {
    let c = cocycle(2, 2, 1, 8);
    let r = c.bunching_report(10, BunchingMode::Exhaustive).unwrap();
    let x = pt("(0)*.0110(1)*");
    let y = pt("(1)*00.0110(1)*");
    let z = pt("(01)*.0110(1)*");
    let check = c.norm_product_check(&x, &y, &z, 40, r.theta_hat).unwrap();
    assert!(check.constant.is_finite());
    assert!(check.worst_ratio <= 1.5, "{check:?}");
    assert!(c.norm_product_check(&x, &y, &pt("(0)*.(0)*"), 5, 0.0).is_err());
}

#[test]
fn bunching_is_monotone_in_the_horizon() {
    let c = cocycle(3, 2, 1, 10);
    let short = c.bunching_report(4, BunchingMode::Exhaustive).unwrap();
    let long = c.bunching_report(7, BunchingMode::Exhaustive).unwrap();
    for (a, b) in short.rows.iter().zip(&long.rows) {
        assert_eq!(a.sup, b.sup);
    }
    assert!(long.rows.windows(2).all(|w| w[1].sup >= 1.0 && w[0].sup >= 1.0));
}

#[test]
fn lyapunov_exponents_of_twisted_cocycles_agree() {
    let s = full(2);
    let a = cocycle(2, 3, 1, 12);
    let q = WindowGenerator::random_near_identity(&s, 3, 0, 0.5, 13).unwrap();
    let b = a.twist(&q).unwrap();
    let p: Point = pt("(011)*.(011)*");
    let la = a.lyapunov_at_periodic(&p, 3).unwrap();
    let lb = b.lyapunov_at_periodic(&p, 3).unwrap();
    assert!((la.lambda_plus - lb.lambda_plus).abs() < 1e-12);
    assert!((la.lambda_minus - lb.lambda_minus).abs() < 1e-12);
}
