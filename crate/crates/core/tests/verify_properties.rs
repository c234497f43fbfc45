use gpi::moments::{moment_ratio, ExponentPair, Regime};
use gpi::verify::{
    algebraic_threshold_check, check_bivariate, check_one_dim, is_strictly_monotone, Verdict,
    DEFAULT_TOLERANCE,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonzero_exponent() -> impl Strategy<Value = f64> {
    prop_oneof![-0.95f64..-0.01, 0.01f64..6.0]
}

proptest! {
    #[test]
    fn bivariate_verdict_invariant_under_exchange_and_parity(
        a1 in nonzero_exponent(), a2 in nonzero_exponent(), rho in 0.05f64..0.9975,
    ) {
        let pair = ExponentPair::new(a1, a2).unwrap();
        let base = check_bivariate(pair, rho, DEFAULT_TOLERANCE).unwrap();
        let swapped = check_bivariate(pair.swapped(), rho, DEFAULT_TOLERANCE).unwrap();
        let flipped = check_bivariate(pair, -rho, DEFAULT_TOLERANCE).unwrap();
        prop_assert_eq!(base.verdict, swapped.verdict);
        prop_assert_eq!(base.verdict, flipped.verdict);
        prop_assert_ne!(base.verdict, Verdict::Violated);
    }

    #[test]
    fn one_dim_never_violated(a1 in nonzero_exponent(), a2 in nonzero_exponent()) {
        prop_assume!(a1 + a2 > -0.95);
        let v = check_one_dim(a1, a2, DEFAULT_TOLERANCE).unwrap();
        prop_assert_ne!(v.verdict, Verdict::Violated);
    }
}

#[test]
fn opposite_sign_ratio_decreases_in_rho() {
    let rhos: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
    for (a1, a2) in [(-0.9, 0.5), (-0.5, 2.0), (-0.1, 4.0), (3.0, -0.7)] {
        let pair = ExponentPair::new(a1, a2).unwrap();
        let values: Vec<f64> = rhos.iter().map(|&r| moment_ratio(pair, r).unwrap()).collect();
        assert!(is_strictly_monotone(&values, true), "({a1},{a2}): {values:?}");
    }
}

#[test]
fn threshold_algebra_matches_sign_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let a1: f64 = rng.random_range(-0.999..10.0);
        let a2: f64 = rng.random_range(-0.999..10.0);
        let check = algebraic_threshold_check(a1, a2).unwrap();
        let regime = ExponentPair::new(a1, a2).unwrap().regime();
        match regime {
            Regime::OppositeSign => assert!(check.opposite_direction, "({a1},{a2})"),
            Regime::Degenerate => assert_eq!(check.sign, 0),
            _ => assert!(check.same_direction, "({a1},{a2})"),
        }
    }
}
