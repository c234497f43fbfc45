use gpi::moments::{
    joint_abs_moment, marginal_abs_moment, moment_ratio, BivariatePairSpec, ExponentPair,
    MomentMethod,
};
use gpi::oracle::isserlis_even_moment;
use proptest::prelude::*;

fn exponent() -> impl Strategy<Value = f64> {
    -0.95f64..5.0
}

fn joint(a1: f64, a2: f64, s1: f64, s2: f64, rho: f64) -> f64 {
    let pair = ExponentPair::new(a1, a2).unwrap();
    joint_abs_moment(pair, BivariatePairSpec::new(s1, s2, rho).unwrap()).unwrap().value
}

proptest! {
    #[test]
    fn scale_invariance(
        a1 in exponent(), a2 in exponent(),
        s1 in 0.2f64..5.0, s2 in 0.2f64..5.0,
        rho in -0.99f64..0.99,
    ) {
        let scaled = joint(a1, a2, s1, s2, rho);
        let unit = joint(a1, a2, 1.0, 1.0, rho) * s1.powf(a1) * s2.powf(a2);
        prop_assert!((scaled / unit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_of_rho_is_irrelevant(a1 in exponent(), a2 in exponent(), rho in 0.0f64..0.9975) {
        let pair = ExponentPair::new(a1, a2).unwrap();
        prop_assert_eq!(moment_ratio(pair, rho).unwrap(), moment_ratio(pair, -rho).unwrap());
    }

    #[test]
    fn exchange_symmetry(a1 in exponent(), a2 in exponent(), rho in -0.9975f64..0.9975) {
        let pair = ExponentPair::new(a1, a2).unwrap();
        let r = moment_ratio(pair, rho).unwrap();
        let s = moment_ratio(pair.swapped(), rho).unwrap();
        prop_assert!((r - s).abs() <= 1e-13 * r);
    }

    #[test]
    fn ratio_is_positive(a1 in exponent(), a2 in exponent(), rho in -0.9975f64..0.9975) {
        prop_assert!(moment_ratio(ExponentPair::new(a1, a2).unwrap(), rho).unwrap() > 0.0);
    }
}

#[test]
fn marginal_examples() {
    let v = marginal_abs_moment(2.0, 1.0).unwrap();
    assert!((v.value - 1.0).abs() < 1e-14);
    let v = marginal_abs_moment(1.0, 1.0).unwrap();
    assert!((v.value - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    assert!(marginal_abs_moment(-1.0, 1.0).is_err());
    assert!(marginal_abs_moment(1.0, 0.0).is_err());
}

#[test]
fn agrees_with_pairing_counts() {
    for p in 0..=3u32 {
        for q in 0..=(6 - p) {
            for rho in [-0.9, -0.3, 0.0, 0.45, 0.9975] {
                let got = joint(2.0 * p as f64, 2.0 * q as f64, 1.0, 1.0, rho);
                let want = isserlis_even_moment(p, q, rho).unwrap();
                assert!((got / want - 1.0).abs() < 1e-11, "p={p} q={q} rho={rho}: {got} vs {want}");
            }
        }
    }
}

/// The gap to the `|rho| = 1` limit shrinks, and when `a1 + a2 < 1` its leading
/// behaviour is `(1 - rho^2)^((1 + a1 + a2) / 2)`.
#[test]
fn approaches_the_rho_one_limit() {
    for (a1, a2) in [(1.0, 1.0), (-0.3, 2.0), (0.5, 0.7), (-0.4, -0.4), (-0.2, 0.3)] {
        let pair = ExponentPair::new(a1, a2).unwrap();
        let limit = joint_abs_moment(pair, BivariatePairSpec::standard(1.0).unwrap()).unwrap();
        assert_eq!(limit.method, MomentMethod::LimitRhoOne);
        let rhos = [0.9, 0.99, 0.9975];
        let gaps: Vec<f64> = rhos
            .iter()
            .map(|&rho| (joint(a1, a2, 1.0, 1.0, rho) - limit.value).abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "({a1},{a2}): {gaps:?}");
        let s = a1 + a2;
        if s < 1.0 {
            let expected = ((1.0 - rhos[2] * rhos[2]) / (1.0 - rhos[1] * rhos[1])).powf((1.0 + s) / 2.0);
            let observed = gaps[2] / gaps[1];
            assert!((observed / expected - 1.0).abs() < 0.05, "({a1},{a2}): {observed} vs {expected}");
        } else {
            assert!(gaps[2] / limit.value < 0.05, "({a1},{a2}): {gaps:?}");
        }
    }
}

#[test]
fn gap_between_cap_and_one_is_rejected() {
    let pair = ExponentPair::new(1.0, 1.0).unwrap();
    assert!(joint_abs_moment(pair, BivariatePairSpec::standard(0.999).unwrap()).is_err());
    assert!(BivariatePairSpec::standard(1.01).is_err());
}
