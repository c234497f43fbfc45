//! Closed-form absolute moments of centered Gaussian variables.
//!
//! For a unit-variance pair with correlation `rho`, `|rho| < 1`,
//!
//! ```text
//! E|X1|^a1 |X2|^a2 = E|X1|^a1 E|X2|^a2 F(-a1/2, -a2/2; 1/2; rho^2)
//! ```
//!
//! so the ratio of the joint moment to the product of marginals is
//! `G(rho^2) = F(-a1/2, -a2/2; 1/2; rho^2)`, independent of the variances.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

use crate::error::{domain, Result};
use crate::special_fn::{
    double_factorial, gauss_2f1, ln_beta, log_gamma, HypergeometricInput, SeriesEvaluation,
};

/// Largest `|rho|` handled by the series; `|rho| = 1` is a separate branch.
pub const RHO_MAX: f64 = 0.9975;

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_1;

/// Rounding-level relative error attached to closed-form values.
const CLOSED_FORM_REL_ERR: f64 = 32.0 * f64::EPSILON;

/// Exponents `(alpha1, alpha2)`, both `> -1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    alpha1: f64,
    alpha2: f64,
}

impl ExponentPair {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<Self> {
        if !(alpha1 > -1.0 && alpha1.is_finite() && alpha2 > -1.0 && alpha2.is_finite()) {
            return domain(format!(
                "exponents must be finite and > -1, got ({alpha1}, {alpha2})"
            ));
        }
        Ok(Self { alpha1, alpha2 })
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    pub fn swapped(&self) -> Self {
        Self {
            alpha1: self.alpha2,
            alpha2: self.alpha1,
        }
    }

    pub fn regime(&self) -> Regime {
        Regime::of(self.alpha1, self.alpha2)
    }
}

/// Sign pattern of an exponent pair, which decides the governing inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SameSignPositive,
    SameSignNegative,
    OppositeSign,
    Degenerate,
}

impl Regime {
    fn of(alpha1: f64, alpha2: f64) -> Self {
        if alpha1 == 0.0 || alpha2 == 0.0 {
            Regime::Degenerate
        } else if alpha1 > 0.0 && alpha2 > 0.0 {
            Regime::SameSignPositive
        } else if alpha1 < 0.0 && alpha2 < 0.0 {
            Regime::SameSignNegative
        } else {
            Regime::OppositeSign
        }
    }

    pub fn is_same_sign(self) -> bool {
        matches!(self, Regime::SameSignPositive | Regime::SameSignNegative)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SameSignPositive => "same_sign_positive",
            Regime::SameSignNegative => "same_sign_negative",
            Regime::OppositeSign => "opposite_sign",
            Regime::Degenerate => "degenerate",
        }
    }
}

/// Standard deviations and correlation of a centered Gaussian pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariatePairSpec {
    sigma1: f64,
    sigma2: f64,
    rho: f64,
}

impl BivariatePairSpec {
    pub fn new(sigma1: f64, sigma2: f64, rho: f64) -> Result<Self> {
        if !(sigma1 > 0.0 && sigma1.is_finite() && sigma2 > 0.0 && sigma2.is_finite()) {
            return domain(format!(
                "standard deviations must be finite and > 0, got ({sigma1}, {sigma2})"
            ));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return domain(format!("correlation must lie in [-1, 1], got {rho}"));
        }
        Ok(Self { sigma1, sigma2, rho })
    }

    /// Unit variances with correlation `rho`.
    pub fn standard(rho: f64) -> Result<Self> {
        Self::new(1.0, 1.0, rho)
    }

    pub fn sigma1(&self) -> f64 {
        self.sigma1
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// How a [`MomentValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ClosedForm,
    Hypergeometric,
    LimitRhoOne,
}

impl MomentMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MomentMethod::ClosedForm => "closed_form",
            MomentMethod::Hypergeometric => "hypergeometric",
            MomentMethod::LimitRhoOne => "limit_rho_one",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub value: f64,
    pub method: MomentMethod,
    /// Absolute error bound.
    pub error_bound: f64,
}

fn ln_standard_abs_moment(nu: f64) -> Result<f64> {
    Ok(0.5 * nu * LN_2 + log_gamma(0.5 * (nu + 1.0))? - LN_SQRT_PI)
}

/// `E|sigma U|^nu = sigma^nu 2^(nu/2) Γ((nu+1)/2) / sqrt(pi)` for a standard
/// Gaussian `U`.
pub fn marginal_abs_moment(nu: f64, sigma: f64) -> Result<MomentValue> {
    if !(nu > -1.0 && nu.is_finite()) {
        return domain(format!("E|U|^nu diverges unless nu > -1, got {nu}"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return domain(format!("sigma must be finite and > 0, got {sigma}"));
    }
    if nu == 0.0 {
        return Ok(MomentValue {
            value: 1.0,
            method: MomentMethod::ClosedForm,
            error_bound: 0.0,
        });
    }
    let value = (nu * sigma.ln() + ln_standard_abs_moment(nu)?).exp();
    Ok(MomentValue {
        value,
        method: MomentMethod::ClosedForm,
        error_bound: value * CLOSED_FORM_REL_ERR,
    })
}

/// `E|X1|^a1 E|X2|^a2`; does not depend on the correlation.
pub fn marginal_product(pair: ExponentPair, spec: BivariatePairSpec) -> Result<MomentValue> {
    let m1 = marginal_abs_moment(pair.alpha1, spec.sigma1)?;
    let m2 = marginal_abs_moment(pair.alpha2, spec.sigma2)?;
    let value = m1.value * m2.value;
    Ok(MomentValue {
        value,
        method: MomentMethod::ClosedForm,
        error_bound: m1.error_bound * m2.value + m2.error_bound * m1.value,
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.abs() <= RHO_MAX) {
        return domain(format!(
            "series route requires |rho| <= {RHO_MAX}, got {rho}"
        ));
    }
    Ok(())
}

/// `G(rho^2)` with its series accounting.
pub fn moment_ratio_eval(pair: ExponentPair, rho: f64) -> Result<SeriesEvaluation> {
    check_rho(rho)?;
    gauss_2f1(HypergeometricInput::new(
        -0.5 * pair.alpha1,
        -0.5 * pair.alpha2,
        0.5,
        rho * rho,
    )?)
}

/// Ratio of the joint absolute moment to the product of marginals,
/// `G(rho^2) = F(-a1/2, -a2/2; 1/2; rho^2)`.
pub fn moment_ratio(pair: ExponentPair, rho: f64) -> Result<f64> {
    Ok(moment_ratio_eval(pair, rho)?.value)
}

/// `E|X1|^a1 |X2|^a2` for a centered Gaussian pair.
///
/// `|rho| <= 0.9975` goes through the hypergeometric series. At `|rho| = 1`,
/// `X2 = ±(sigma2/sigma1) X1` almost surely and the moment reduces to
/// `sigma1^a1 sigma2^a2 E|U|^(a1+a2)`, finite only for `a1 + a2 > -1`.
pub fn joint_abs_moment(pair: ExponentPair, spec: BivariatePairSpec) -> Result<MomentValue> {
    let rho = spec.rho;
    if rho.abs() == 1.0 {
        let total = pair.alpha1 + pair.alpha2;
        if total <= -1.0 {
            return domain(format!(
                "at |rho| = 1 the moment diverges for alpha1 + alpha2 = {total} <= -1"
            ));
        }
        let scale = (pair.alpha1 * spec.sigma1.ln() + pair.alpha2 * spec.sigma2.ln()).exp();
        let m = marginal_abs_moment(total, 1.0)?;
        return Ok(MomentValue {
            value: scale * m.value,
            method: MomentMethod::LimitRhoOne,
            error_bound: scale * m.error_bound,
        });
    }
    check_rho(rho)?;
    let product = marginal_product(pair, spec)?;
    let g = moment_ratio_eval(pair, rho)?;
    let value = product.value * g.value;
    Ok(MomentValue {
        value,
        method: MomentMethod::Hypergeometric,
        error_bound: product.value * g.tail_bound
            + product.error_bound * g.value.abs()
            + value.abs() * CLOSED_FORM_REL_ERR,
    })
}

/// Ratio `E|X1|^a1 |X2|^(2m) / (E|X1|^a1 E|X2|^(2m))` as the finite sum
///
/// ```text
/// (1-rho^2)^m + sum_{j=1}^m C(m,j) rho^(2j) (1-rho^2)^(m-j)
///                 * (a1+2j-1)(a1+2j-3)...(a1+1) / (2j-1)!!
/// ```
pub fn even_exponent_ratio(alpha1: f64, m: u32, rho: f64) -> Result<f64> {
    if !(alpha1 > -1.0 && alpha1.is_finite()) {
        return domain(format!("alpha1 must exceed -1, got {alpha1}"));
    }
    if m == 0 {
        return domain("m must be a positive integer");
    }
    if !(rho.abs() < 1.0) {
        return domain(format!("even_exponent_ratio needs |rho| < 1, got {rho}"));
    }
    let r2 = rho * rho;
    let q = 1.0 - r2;
    let mut sum = q.powi(m as i32);
    let mut rising = 1.0;
    let mut binom = 1.0;
    for j in 1..=m {
        let jf = f64::from(j);
        rising *= alpha1 + 2.0 * jf - 1.0;
        binom = binom * f64::from(m - j + 1) / jf;
        let dfact = double_factorial(2 * i64::from(j) - 1)?;
        sum += binom * r2.powi(j as i32) * q.powi((m - j) as i32) * rising / dfact;
    }
    Ok(sum)
}

/// `E|X|^(a1+a2) / (E|X|^a1 E|X|^a2) = B((a1+a2+1)/2, 1/2) / B((a1+1)/2, (a2+1)/2)`.
pub fn one_dim_ratio(alpha1: f64, alpha2: f64) -> Result<f64> {
    let pair = ExponentPair::new(alpha1, alpha2)?;
    let total = pair.alpha1 + pair.alpha2;
    if total <= -1.0 {
        return domain(format!(
            "E|X|^(alpha1+alpha2) diverges for alpha1 + alpha2 = {total} <= -1"
        ));
    }
    if alpha1 == 0.0 || alpha2 == 0.0 {
        return Ok(1.0);
    }
    let (lo, hi) = if alpha1 <= alpha2 { (alpha1, alpha2) } else { (alpha2, alpha1) };
    let ln_num = ln_beta(0.5 * (total + 1.0), 0.5)?;
    let ln_den = ln_beta(0.5 * (lo + 1.0), 0.5 * (hi + 1.0))?;
    Ok((ln_num - ln_den).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a1: f64, a2: f64) -> ExponentPair {
        ExponentPair::new(a1, a2).unwrap()
    }

    fn unit(rho: f64) -> BivariatePairSpec {
        BivariatePairSpec::standard(rho).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(marginal_abs_moment(0.0, 1.0).unwrap().value, 1.0);
        assert!(rel(marginal_abs_moment(2.0, 1.0).unwrap().value, 1.0) < 1e-14);
        let half_normal = (2.0 / std::f64::consts::PI).sqrt();
        assert!(rel(marginal_abs_moment(1.0, 1.0).unwrap().value, half_normal) < 1e-14);
        // 2^(-1/4) Γ(1/4) / sqrt(pi), 40-digit reference.
        let v = marginal_abs_moment(-0.5, 1.0).unwrap().value;
        assert!(rel(v, 1.720_079_974_649_039_070_8) < 1e-13);
        assert!(rel(marginal_abs_moment(2.0, 3.0).unwrap().value, 9.0) < 1e-14);
    }

    #[test]
    fn marginal_domain() {
        assert!(marginal_abs_moment(-1.0, 1.0).is_err());
        assert!(marginal_abs_moment(0.5, 0.0).is_err());
        assert!(marginal_abs_moment(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn product_examples() {
        let spec = BivariatePairSpec::new(1.0, 1.0, 0.3).unwrap();
        assert!(rel(marginal_product(pair(2.0, 2.0), spec).unwrap().value, 1.0) < 1e-14);
        let v = marginal_product(pair(0.0, 5.0), unit(0.0)).unwrap().value;
        assert!(rel(v, 6.383_076_486_422_922_847) < 1e-13);
        let scaled = BivariatePairSpec::new(2.0, 3.0, -0.7).unwrap();
        let v = marginal_product(pair(1.0, 1.0), scaled).unwrap().value;
        assert!(rel(v, 12.0 / std::f64::consts::PI) < 1e-13);
    }

    #[test]
    fn joint_examples() {
        let v = joint_abs_moment(pair(2.0, 2.0), unit(0.5)).unwrap();
        assert!(rel(v.value, 1.5) < 1e-14);
        assert_eq!(v.method, MomentMethod::Hypergeometric);

        let p = pair(-0.3, 1.7);
        assert_eq!(
            joint_abs_moment(p, unit(0.0)).unwrap().value,
            marginal_product(p, unit(0.0)).unwrap().value
        );

        let p = pair(-0.5, 2.0);
        let v = joint_abs_moment(p, unit(0.5)).unwrap().value;
        let mp = marginal_product(p, unit(0.5)).unwrap().value;
        assert!(rel(v, 0.875 * mp) < 1e-14);

        let v = joint_abs_moment(pair(1.0, 1.0), unit(1.0)).unwrap();
        assert_eq!(v.method, MomentMethod::LimitRhoOne);
        assert!(rel(v.value, 1.0) < 1e-14);
        let v = joint_abs_moment(pair(1.0, 1.0), unit(-1.0)).unwrap();
        assert!(rel(v.value, 1.0) < 1e-14);
    }

    #[test]
    fn joint_domain() {
        assert!(joint_abs_moment(pair(1.0, 1.0), unit(0.999)).is_err());
        assert!(joint_abs_moment(pair(-0.6, -0.6), unit(1.0)).is_err());
        assert!(joint_abs_moment(pair(-0.6, -0.3), unit(1.0)).is_ok());
        assert!(BivariatePairSpec::new(1.0, 1.0, 1.2).is_err());
        assert!(BivariatePairSpec::new(-1.0, 1.0, 0.2).is_err());
        assert!(ExponentPair::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert!((moment_ratio(pair(-0.5, 2.0), 0.5).unwrap() - 0.875).abs() < 1e-15);
        assert_eq!(moment_ratio(pair(3.1, -0.7), 0.0).unwrap(), 1.0);
        assert!((moment_ratio(pair(2.0, 4.0), 0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(moment_ratio(pair(2.0, 4.0), 0.998).is_err());
    }

    #[test]
    fn even_ratio_examples() {
        assert!((even_exponent_ratio(-0.5, 1, 0.5).unwrap() - 0.875).abs() < 1e-15);
        assert_eq!(even_exponent_ratio(1.3, 1, 0.0).unwrap(), 1.0);
        assert!((even_exponent_ratio(2.0, 2, 0.5).unwrap() - 2.0).abs() < 1e-14);
        assert!(even_exponent_ratio(2.0, 0, 0.5).is_err());
        assert!(even_exponent_ratio(2.0, 1, 1.0).is_err());
        assert!(even_exponent_ratio(-1.0, 1, 0.5).is_err());
    }

    #[test]
    fn one_dim_examples() {
        assert_eq!(one_dim_ratio(0.0, 3.7).unwrap(), 1.0);
        assert!((one_dim_ratio(1.0, 1.0).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let v = one_dim_ratio(-0.5, 1.0).unwrap();
        assert!((v - 0.599_070_117_367_796_103_7).abs() < 1e-12);
        assert!(v < 2.0 / 3.0);
        assert_eq!(one_dim_ratio(-0.5, 1.0).unwrap(), one_dim_ratio(1.0, -0.5).unwrap());
        assert!(one_dim_ratio(-0.6, -0.5).is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(pair(2.0, 4.0).regime(), Regime::SameSignPositive);
        assert_eq!(pair(-0.5, -0.2).regime(), Regime::SameSignNegative);
        assert_eq!(pair(-0.5, 3.0).regime(), Regime::OppositeSign);
        assert_eq!(pair(3.0, -0.5).regime(), Regime::OppositeSign);
        assert_eq!(pair(0.0, 7.0).regime(), Regime::Degenerate);
    }
}
