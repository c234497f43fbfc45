//! Gauss hypergeometric function
//!
//! ```text
//! F(a, b; c; z) = sum_n (a)_n (b)_n / ((c)_n n!) z^n,   |z| < 1
//! ```
//!
//! evaluated by its power series with compensated summation. For `z > 0.75`
//! with `c - a - b > 0` the Euler transformation
//! `F(a,b;c;z) = (1-z)^(c-a-b) F(c-a, c-b; c; z)` is applied first whenever it
//! shrinks the parameters.
//!
//! Truncation is certified with a geometric majorant. For `k >= n` and
//! `n + c > 0` the term ratio satisfies
//!
//! ```text
//! |t_{k+1}/t_k| = |z| |(a+k)/(k+1)| |(b+k)/(c+k)|
//!              <= |z| (1 + |a-1|/(n+1)) (1 + |b-c|/(n+c)) =: r_n
//! ```
//!
//! (and likewise with `a` and `b` swapped), so once `r_n < 1` the remainder
//! after `t_n` is at most `|t_n| r_n / (1 - r_n)`.

use super::{CompensatedSum, SeriesEvaluation};
use crate::error::{domain, Error, Result};

/// Largest `|z|` accepted by [`gauss_2f1`]: `0.9975^2`, so that every
/// correlation with `|rho| <= 0.9975` maps into the domain.
pub const Z_MAX: f64 = 0.9975 * 0.9975;

/// Hard cap on the number of series terms.
pub const MAX_SERIES_TERMS: usize = 1_000_000;

const EULER_SWITCH_Z: f64 = 0.75;

/// Arguments of `F(a, b; c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeometricInput {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub z: f64,
}

fn non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

impl HypergeometricInput {
    /// Validates `|z| < 1` and that `c` is not a pole (`0, -1, -2, ...`).
    pub fn new(a: f64, b: f64, c: f64, z: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
            return domain(format!("2F1 parameters must be finite: ({a}, {b}; {c}; {z})"));
        }
        if z.abs() >= 1.0 {
            return domain(format!("2F1 series needs |z| < 1, got {z}"));
        }
        if non_positive_integer(c) {
            return domain(format!("2F1 has a pole at c = {c}"));
        }
        Ok(Self { a, b, c, z })
    }

    /// Degree of the polynomial when `a` or `b` is a non-positive integer.
    fn terminating_degree(&self) -> Option<usize> {
        [self.a, self.b]
            .into_iter()
            .filter(|&p| non_positive_integer(p))
            .map(|p| (-p) as usize)
            .min()
    }
}

/// `F(a, b; c; z)` with a certified truncation bound.
///
/// When `a` or `b` is a non-positive integer the polynomial is summed in full
/// and `tail_bound` is zero.
pub fn gauss_2f1(input: HypergeometricInput) -> Result<SeriesEvaluation> {
    let HypergeometricInput { a, b, c, z } = HypergeometricInput::new(input.a, input.b, input.c, input.z)?;
    if z.abs() > Z_MAX {
        return domain(format!("2F1 evaluated only for |z| <= {Z_MAX}, got {z}"));
    }
    if input.terminating_degree().is_none() && z > EULER_SWITCH_Z {
        let excess = c - a - b;
        let (ta, tb) = (c - a, c - b);
        if excess > 0.0 && ta.abs() + tb.abs() < a.abs() + b.abs() {
            let prefactor = (excess * (-z).ln_1p()).exp();
            let inner = power_series(HypergeometricInput { a: ta, b: tb, c, z })?;
            return Ok(SeriesEvaluation {
                value: prefactor * inner.value,
                terms_used: inner.terms_used,
                tail_bound: prefactor * inner.tail_bound,
            });
        }
    }
    power_series(input)
}

fn power_series(input: HypergeometricInput) -> Result<SeriesEvaluation> {
    let HypergeometricInput { a, b, c, z } = input;
    if let Some(degree) = input.terminating_degree() {
        let mut sum = CompensatedSum::new(1.0);
        let mut term = 1.0;
        for n in 0..degree {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
            sum.add(term);
        }
        return Ok(SeriesEvaluation {
            value: sum.value(),
            terms_used: degree + 1,
            tail_bound: 0.0,
        });
    }

    let az = z.abs();
    let mut sum = CompensatedSum::new(1.0);
    let mut term = 1.0_f64;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        if nf + c > 0.0 {
            let r1 = (1.0 + (a - 1.0).abs() / (nf + 1.0)) * (1.0 + (b - c).abs() / (nf + c));
            let r2 = (1.0 + (b - 1.0).abs() / (nf + 1.0)) * (1.0 + (a - c).abs() / (nf + c));
            let r = az * r1.min(r2);
            if r < 1.0 {
                let tail = term.abs() * r / (1.0 - r);
                let value = sum.value();
                if tail <= f64::EPSILON * 0.5 * value.abs() || tail == 0.0 {
                    return Ok(SeriesEvaluation {
                        value,
                        terms_used: n + 1,
                        tail_bound: tail,
                    });
                }
            }
        }
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum.add(term);
    }
    Err(Error::NonConvergence {
        what: format!("2F1({a}, {b}; {c}; {z})"),
        terms: MAX_SERIES_TERMS,
    })
}

fn check_kernel_args(alpha1: f64, alpha2: f64, z: f64) -> Result<()> {
    if !(alpha1 > -1.0 && alpha2 > -1.0) || !alpha1.is_finite() || !alpha2.is_finite() {
        return domain(format!("exponents must exceed -1, got ({alpha1}, {alpha2})"));
    }
    if !(z.abs() <= Z_MAX) {
        return domain(format!("kernel derivative needs |z| <= {Z_MAX}, got {z}"));
    }
    Ok(())
}

/// Derivative of `G(z) = F(-a1/2, -a2/2; 1/2; z)` through the Euler-transformed
/// form
///
/// `G'(z) = (a1 a2 / 2) (1-z)^((a1+a2-1)/2) F((a1+1)/2, (a2+1)/2; 3/2; z)`,
///
/// returned with the propagated series bound. Exactly zero when `a1 a2 = 0`.
pub fn gpi_kernel_derivative_with_bound(
    alpha1: f64,
    alpha2: f64,
    z: f64,
) -> Result<SeriesEvaluation> {
    check_kernel_args(alpha1, alpha2, z)?;
    let prefactor = 0.5 * alpha1 * alpha2;
    if prefactor == 0.0 {
        return Ok(SeriesEvaluation {
            value: 0.0,
            terms_used: 1,
            tail_bound: 0.0,
        });
    }
    let scale = prefactor * (0.5 * (alpha1 + alpha2 - 1.0) * (-z).ln_1p()).exp();
    let f = gauss_2f1(HypergeometricInput::new(
        0.5 * (alpha1 + 1.0),
        0.5 * (alpha2 + 1.0),
        1.5,
        z,
    )?)?;
    Ok(SeriesEvaluation {
        value: scale * f.value,
        terms_used: f.terms_used,
        tail_bound: scale.abs() * f.tail_bound,
    })
}

/// `G'(z)`; see [`gpi_kernel_derivative_with_bound`].
pub fn gpi_kernel_derivative(alpha1: f64, alpha2: f64, z: f64) -> Result<f64> {
    Ok(gpi_kernel_derivative_with_bound(alpha1, alpha2, z)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(a: f64, b: f64, c: f64, z: f64) -> SeriesEvaluation {
        gauss_2f1(HypergeometricInput::new(a, b, c, z).unwrap()).unwrap()
    }

    // Straight power series, no transformation, no tail accounting.
    fn naive_series(a: f64, b: f64, c: f64, z: f64, terms: usize) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..terms {
            let n = n as f64;
            term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
            sum += term;
        }
        sum
    }

    #[test]
    fn terminating_examples() {
        let e = f(-1.0, -1.0, 0.5, 0.36);
        assert!((e.value - 1.72).abs() < 1e-15);
        assert_eq!(e.tail_bound, 0.0);

        let e = f(0.25, -1.0, 0.5, 0.25);
        assert!((e.value - 0.875).abs() < 1e-15);
        assert_eq!(e.tail_bound, 0.0);

        let e = f(0.0, 3.3, 0.7, 0.9);
        assert_eq!(e.value, 1.0);
        assert_eq!(e.tail_bound, 0.0);
    }

    #[test]
    fn zero_argument() {
        for &(a, b, c) in &[(0.3, -2.5, 1.5), (7.0, 2.0, 0.5), (-0.45, 1.1, 3.0)] {
            assert_eq!(f(a, b, c, 0.0).value, 1.0);
        }
    }

    #[test]
    fn arcsin_closed_form() {
        let e = f(0.5, 0.5, 1.5, 0.81);
        let want = 0.9_f64.asin() / 0.9;
        assert!((e.value / want - 1.0).abs() < 1e-12, "{}", e.value);
        assert!((e.value - 1.244_188_349_998_482_4).abs() < 1e-12);
    }

    #[test]
    fn matches_naive_series_inside_unit_disc() {
        for &(a, b, c, z) in &[
            (0.45, -0.25, 0.5, 0.5),
            (-1.7, 0.3, 0.5, -0.6),
            (1.2, 2.1, 1.5, 0.3),
        ] {
            let got = f(a, b, c, z).value;
            let want = naive_series(a, b, c, z, 400);
            assert!((got / want - 1.0).abs() < 1e-12, "{a} {b} {c} {z}");
        }
    }

    #[test]
    fn reference_values_near_domain_edge() {
        // 40-digit references at z = 0.9975^2.
        let z = 0.9975_f64 * 0.9975;
        let cases = [
            (-0.9, 0.5, 0.384_219_485_412_149_748_59),
            (0.5, 4.0, 1.747_496_890_615_234_428_4),
            (-0.9, -0.1, 1.243_188_639_685_860_409_3),
            (4.0, 4.0, 11.600_149_833_437_501_415),
        ];
        for (a1, a2, want) in cases {
            let got = f(-a1 / 2.0, -a2 / 2.0, 0.5, z).value;
            assert!((got / want - 1.0).abs() < 1e-7, "({a1},{a2}): {got} vs {want}");
        }
        let got = f(0.25, -0.5, 0.5, 0.81).value;
        assert!((got / 0.736_734_744_160_248_104_39 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_bound_dominates_error() {
        // Euler route against the untransformed naive series far beyond the cut.
        let e = f(0.45, 0.05, 0.5, 0.9);
        let want = naive_series(0.45, 0.05, 0.5, 0.9, 20_000);
        assert!((e.value - want).abs() <= e.tail_bound + 1e-13 * want.abs());
    }

    #[test]
    fn domain_errors() {
        assert!(HypergeometricInput::new(1.0, 1.0, 0.0, 0.1).is_err());
        assert!(HypergeometricInput::new(1.0, 1.0, -3.0, 0.1).is_err());
        assert!(HypergeometricInput::new(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(HypergeometricInput::new(1.0, 1.0, 1.0, f64::NAN).is_err());
        let near_one = HypergeometricInput::new(0.5, 0.5, 1.5, 0.999).unwrap();
        assert!(matches!(gauss_2f1(near_one), Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_derivative_examples() {
        assert_eq!(gpi_kernel_derivative(2.0, 2.0, 0.0).unwrap(), 2.0);
        assert_eq!(gpi_kernel_derivative(-0.5, 2.0, 0.0).unwrap(), -0.5);
        assert_eq!(gpi_kernel_derivative(0.0, 2.0, 0.4).unwrap(), 0.0);

        // Centered difference of the naive G series.
        let g = |z: f64| naive_series(0.25, -1.5, 0.5, z, 2_000);
        let h = 1e-5;
        let fd = (g(0.5 + h) - g(0.5 - h)) / (2.0 * h);
        let d = gpi_kernel_derivative(-0.5, 3.0, 0.5).unwrap();
        assert!(d < 0.0);
        assert!((d - fd).abs() < 1e-6);
        assert!((d - -0.570_247_423_134_653_800_41).abs() < 1e-12);
    }

    #[test]
    fn kernel_derivative_domain() {
        assert!(gpi_kernel_derivative(-1.0, 2.0, 0.1).is_err());
        assert!(gpi_kernel_derivative(0.5, 2.0, 0.999).is_err());
        assert!(gpi_kernel_derivative(0.5, f64::NAN, 0.1).is_err());
    }
}
