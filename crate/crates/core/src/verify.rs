//! Inequality certification.
//!
//! Every check produces an [`InequalityVerdict`]: the computed ratio, the
//! value it is compared with, the signed margin and whether the margin lies on
//! the side the governing theorem predicts. `Violated` is an ordinary return
//! value so that sweeps always run to completion.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::moments::{moment_ratio_eval, one_dim_ratio, ExponentPair, Regime, RHO_MAX};
use crate::special_fn::{gpi_kernel_derivative_with_bound, log_gamma, MAX_SERIES_TERMS, Z_MAX};

/// Floor of the equality band.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest `z` accepted by [`check_monotonicity`].
pub const MONOTONE_Z_MAX: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statement {
    BivariateGPI,
    BivariateOppositeGPI,
    OneDimUpper,
    OneDimLower,
    MonotoneDecreasing,
    MonotoneIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    HoldsStrict,
    Equality,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::HoldsStrict => "HoldsStrict",
            Verdict::Equality => "Equality",
            Verdict::Violated => "Violated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub statement: Statement,
    pub ratio: f64,
    pub threshold: f64,
    /// `ratio - threshold`.
    pub margin: f64,
    pub verdict: Verdict,
    /// Half-width of the equality band.
    pub tolerance: f64,
    /// Certified numerical error of `ratio`.
    pub error_bound: f64,
}

/// What the governing result says about `ratio - threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Expected {
    Zero,
    Positive,
    Negative,
}

fn decide(margin: f64, tolerance: f64, expected: Expected) -> Verdict {
    if margin.abs() <= tolerance {
        return Verdict::Equality;
    }
    let holds = match expected {
        Expected::Zero => false,
        Expected::Positive => margin > 0.0,
        Expected::Negative => margin < 0.0,
    };
    if holds {
        Verdict::HoldsStrict
    } else {
        Verdict::Violated
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return domain(format!("tolerance must be finite and > 0, got {tolerance}"));
    }
    Ok(())
}

/// Equality band actually applied: never narrower than ten times the
/// certified error.
fn band(tolerance: f64, error_bound: f64) -> f64 {
    tolerance.max(10.0 * error_bound)
}

pub fn classify_regime(pair: ExponentPair) -> Regime {
    pair.regime()
}

/// Compares `E|X1|^a1 |X2|^a2` with `E|X1|^a1 E|X2|^a2` through the ratio
/// `G(rho^2)` against 1.
///
/// Same-sign exponents predict `ratio > 1`, opposite signs `ratio < 1`, and a
/// zero exponent or `rho = 0` predicts equality.
pub fn check_bivariate(pair: ExponentPair, rho: f64, tolerance: f64) -> Result<InequalityVerdict> {
    check_tolerance(tolerance)?;
    let eval = moment_ratio_eval(pair, rho)?;
    let regime = pair.regime();
    let statement = if regime == Regime::OppositeSign {
        Statement::BivariateOppositeGPI
    } else {
        Statement::BivariateGPI
    };
    let expected = if regime == Regime::Degenerate || rho == 0.0 {
        Expected::Zero
    } else if regime == Regime::OppositeSign {
        Expected::Negative
    } else {
        Expected::Positive
    };
    let ratio = eval.value;
    let error_bound = eval.tail_bound + 64.0 * f64::EPSILON * ratio.abs();
    let tolerance = band(tolerance, error_bound);
    let margin = ratio - 1.0;
    Ok(InequalityVerdict {
        statement,
        ratio,
        threshold: 1.0,
        margin,
        verdict: decide(margin, tolerance, expected),
        tolerance,
        error_bound,
    })
}

/// `(a1+1)(a2+1)/(a1+a2+1)`, the comparison value for the one-dimensional
/// inequalities.
pub fn one_dim_threshold(alpha1: f64, alpha2: f64) -> f64 {
    (alpha1 + 1.0) * (alpha2 + 1.0) / (alpha1 + alpha2 + 1.0)
}

/// Compares `E|X|^(a1+a2) / (E|X|^a1 E|X|^a2)` with `(a1+1)(a2+1)/(a1+a2+1)`:
/// strictly below for opposite signs, strictly above for same signs.
pub fn check_one_dim(alpha1: f64, alpha2: f64, tolerance: f64) -> Result<InequalityVerdict> {
    check_tolerance(tolerance)?;
    let ratio = one_dim_ratio(alpha1, alpha2)?;
    let regime = ExponentPair::new(alpha1, alpha2)?.regime();
    let (statement, expected) = match regime {
        Regime::OppositeSign => (Statement::OneDimUpper, Expected::Negative),
        Regime::Degenerate => (Statement::OneDimLower, Expected::Zero),
        _ => (Statement::OneDimLower, Expected::Positive),
    };
    let threshold = one_dim_threshold(alpha1, alpha2);
    // The ratio is exp of a sum of six log-gamma values, each good to a
    // relative 1e-13.
    let error_bound = if regime == Regime::Degenerate {
        0.0
    } else {
        let total = alpha1 + alpha2;
        let mut lg = 0.0;
        for x in [
            0.5 * (total + 1.0),
            0.5,
            total + 1.5,
            0.5 * (alpha1 + 1.0),
            0.5 * (alpha2 + 1.0),
            0.5 * (total + 2.0),
        ] {
            lg += log_gamma(x)?.abs();
        }
        ratio * (1e-13 * lg + 16.0 * f64::EPSILON) + 4.0 * f64::EPSILON * threshold
    };
    let tolerance = band(tolerance, error_bound);
    let margin = ratio - threshold;
    Ok(InequalityVerdict {
        statement,
        ratio,
        threshold,
        margin,
        verdict: decide(margin, tolerance, expected),
        tolerance,
        error_bound,
    })
}

/// Sign check of `G'(z)` on a grid in `[0, 0.9]`, cross-checked against the
/// ordering of `G` itself.
///
/// The reported `ratio` is the grid value of `G'` nearest the forbidden side
/// (the largest for a decreasing claim, the smallest for an increasing one)
/// and `threshold` is 0. A zero exponent gives `G' = 0` identically and an
/// `Equality` verdict.
pub fn check_monotonicity(pair: ExponentPair, z_grid: &[f64]) -> Result<InequalityVerdict> {
    if z_grid.is_empty() {
        return domain("monotonicity grid is empty");
    }
    if let Some(z) = z_grid
        .iter()
        .find(|z| !(0.0..=MONOTONE_Z_MAX).contains(*z))
    {
        return domain(format!("monotonicity grid points must lie in [0, {MONOTONE_Z_MAX}], got {z}"));
    }
    let regime = pair.regime();
    let (statement, expected) = match regime {
        Regime::OppositeSign => (Statement::MonotoneDecreasing, Expected::Negative),
        Regime::Degenerate => (Statement::MonotoneIncreasing, Expected::Zero),
        _ => (Statement::MonotoneIncreasing, Expected::Positive),
    };

    let mut extreme: Option<f64> = None;
    let mut error_bound = 0.0_f64;
    for &z in z_grid {
        let d = gpi_kernel_derivative_with_bound(pair.alpha1(), pair.alpha2(), z)?;
        error_bound = error_bound.max(d.tail_bound + 64.0 * f64::EPSILON * d.value.abs());
        extreme = Some(match (extreme, expected) {
            (None, _) => d.value,
            (Some(e), Expected::Negative) => e.max(d.value),
            (Some(e), _) => e.min(d.value),
        });
    }
    let ratio = extreme.expect("grid is non-empty");
    let tolerance = 10.0 * error_bound;
    let mut verdict = decide(ratio, tolerance, expected);

    if verdict != Verdict::Violated && expected != Expected::Zero {
        let mut zs = z_grid.to_vec();
        zs.sort_by(f64::total_cmp);
        zs.dedup();
        let mut values = Vec::with_capacity(zs.len());
        for &z in &zs {
            values.push(moment_ratio_eval(pair, z.sqrt())?);
        }
        let backwards = values.windows(2).any(|w| {
            let step = w[1].value - w[0].value;
            let slack = w[0].tail_bound + w[1].tail_bound
                + 64.0 * f64::EPSILON * (w[0].value.abs() + w[1].value.abs());
            match expected {
                Expected::Negative => step > slack,
                _ => step < -slack,
            }
        });
        if backwards {
            verdict = Verdict::Violated;
        }
    }

    Ok(InequalityVerdict {
        statement,
        ratio,
        threshold: 0.0,
        margin: ratio,
        verdict,
        tolerance,
        error_bound,
    })
}

/// Exact comparison of `(a1+a2+1)/2 * 1/2` with `(a1+1)/2 * (a2+1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdAlgebra {
    /// Sign of `-a1 a2`, which equals the sign of the difference of the two
    /// products.
    pub sign: i8,
    /// The left product is strictly larger, as for opposite-sign exponents.
    pub opposite_direction: bool,
    /// The left product is strictly smaller, as for same-sign exponents.
    pub same_direction: bool,
}

/// Evaluates the product comparison in exact rational arithmetic on the
/// binary values of the inputs.
pub fn algebraic_threshold_check(alpha1: f64, alpha2: f64) -> Result<ThresholdAlgebra> {
    let pair = ExponentPair::new(alpha1, alpha2)?;
    let exact = |x: f64| BigRational::from_float(x).expect("finite by construction");
    let (a1, a2) = (exact(pair.alpha1()), exact(pair.alpha2()));
    let one = BigRational::one();
    let four = BigRational::from_integer(BigInt::from(4));
    let left = (&a1 + &a2 + &one) / &four;
    let right = (&a1 + &one) * (&a2 + &one) / &four;
    let diff = left - right;
    let sign = if diff.is_zero() {
        0
    } else if diff.is_positive() {
        1
    } else {
        -1
    };
    Ok(ThresholdAlgebra {
        sign,
        opposite_direction: sign > 0,
        same_direction: sign < 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alpha1_values: Vec<f64>,
    pub alpha2_values: Vec<f64>,
    pub rho_values: Vec<f64>,
}

impl SweepGrid {
    /// All three axes must be non-empty. Out-of-domain entries are accepted
    /// here and reported as skipped points by [`sweep`].
    pub fn new(alpha1_values: Vec<f64>, alpha2_values: Vec<f64>, rho_values: Vec<f64>) -> Result<Self> {
        if alpha1_values.is_empty() || alpha2_values.is_empty() || rho_values.is_empty() {
            return domain("sweep grid axes must be non-empty");
        }
        Ok(Self {
            alpha1_values,
            alpha2_values,
            rho_values,
        })
    }

    /// Seven exponents on each axis crossed with nine correlations, covering
    /// every regime, both signs of `rho` and the edge of the series domain.
    pub fn selftest() -> Self {
        let alphas = vec![-0.9, -0.5, -0.1, 0.5, 1.0, 2.0, 4.0];
        let rhos = vec![0.0, 0.1, -0.1, 0.5, -0.5, 0.9, -0.9, RHO_MAX, -RHO_MAX];
        Self {
            alpha1_values: alphas.clone(),
            alpha2_values: alphas,
            rho_values: rhos,
        }
    }

    pub fn len(&self) -> usize {
        self.alpha1_values.len() * self.alpha2_values.len() * self.rho_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Point `index` in iteration order (`alpha1` outermost, `rho` innermost).
    pub fn point(&self, index: usize) -> (f64, f64, f64) {
        let nr = self.rho_values.len();
        let n2 = self.alpha2_values.len();
        let r = index % nr;
        let j = (index / nr) % n2;
        let i = index / (nr * n2);
        (self.alpha1_values[i], self.alpha2_values[j], self.rho_values[r])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho: f64,
    pub regime: Regime,
    pub verdict: InequalityVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub alpha1: f64,
    pub alpha2: f64,
    pub rho: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub holds_strict: usize,
    pub equality: usize,
    pub violated: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::HoldsStrict => self.holds_strict += 1,
            Verdict::Equality => self.equality += 1,
            Verdict::Violated => self.violated += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub tolerance: f64,
    /// Seconds since the Unix epoch; left empty by [`sweep`] so that reports
    /// are reproducible, and filled in by callers that want it.
    pub timestamp: Option<u64>,
    pub library_version: String,
    pub max_series_terms: usize,
    pub rho_max: f64,
    pub z_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SkippedPoint>,
    pub counts: BTreeMap<Regime, VerdictCounts>,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    pub fn violations(&self) -> usize {
        self.counts.values().map(|c| c.violated).sum()
    }
}

/// Runs [`check_bivariate`] over every grid point. Points are evaluated in
/// parallel; the report lists them in grid order (`alpha1` outermost, `rho`
/// innermost) with results identical to a serial run.
pub fn sweep(grid: &SweepGrid, tolerance: f64) -> Result<SweepReport> {
    check_tolerance(tolerance)?;
    let outcomes: Vec<std::result::Result<SweepRecord, SkippedPoint>> = (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let (alpha1, alpha2, rho) = grid.point(index);
            let checked = ExponentPair::new(alpha1, alpha2)
                .and_then(|pair| Ok((pair, check_bivariate(pair, rho, tolerance)?)));
            match checked {
                Ok((pair, verdict)) => Ok(SweepRecord {
                    alpha1,
                    alpha2,
                    rho,
                    regime: pair.regime(),
                    verdict,
                }),
                Err(e) => Err(SkippedPoint {
                    alpha1,
                    alpha2,
                    rho,
                    reason: e.to_string(),
                }),
            }
        })
        .collect();

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut counts: BTreeMap<Regime, VerdictCounts> = BTreeMap::new();
    for outcome in outcomes {
        match outcome {
            Ok(rec) => {
                counts.entry(rec.regime).or_default().add(rec.verdict.verdict);
                records.push(rec);
            }
            Err(skip) => skipped.push(skip),
        }
    }
    Ok(SweepReport {
        records,
        skipped,
        counts,
        metadata: SweepMetadata {
            tolerance,
            timestamp: None,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            max_series_terms: MAX_SERIES_TERMS,
            rho_max: RHO_MAX,
            z_max: Z_MAX,
        },
    })
}

/// `z_0 < z_1 < ...` ordering check helper for callers holding `(z, G(z))`.
pub fn is_strictly_monotone(values: &[f64], decreasing: bool) -> bool {
    values.windows(2).all(|w| match w[1].partial_cmp(&w[0]) {
        Some(Ordering::Less) => decreasing,
        Some(Ordering::Greater) => !decreasing,
        _ => false,
    })
}
