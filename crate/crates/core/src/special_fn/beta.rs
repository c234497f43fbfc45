use super::{log_gamma, CompensatedSum, SeriesEvaluation};
use crate::error::{domain, Error, Result};

/// Relative accuracy at which [`beta_product`] stops adding factors.
const PRODUCT_REL_TARGET: f64 = 1e-10;

fn check_args(x: f64, y: f64, what: &str) -> Result<()> {
    if !(x.is_finite() && y.is_finite() && x > 0.0 && y > 0.0) {
        return domain(format!("{what} requires x, y > 0, got ({x}, {y})"));
    }
    Ok(())
}

/// `ln B(x, y)` for `x, y > 0`.
pub fn ln_beta(x: f64, y: f64) -> Result<f64> {
    check_args(x, y, "ln_beta")?;
    Ok(log_gamma(x)? + log_gamma(y)? - log_gamma(x + y)?)
}

/// The Beta function `Γ(x)Γ(y)/Γ(x+y)`.
pub fn beta(x: f64, y: f64) -> Result<f64> {
    // Sort so that B(x, y) and B(y, x) are bit-identical.
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let b = ln_beta(lo, hi)?.exp();
    if !b.is_finite() {
        return Err(Error::Overflow(format!("beta({x}, {y}) exceeds f64 range")));
    }
    Ok(b)
}

/// Beta function from the infinite product
///
/// `B(x,y) = (x+y)/(xy) * prod_{n>=1} (1 + xy/(n(x+y+n)))^{-1}`.
///
/// The log-factors `ln(1 + u_n)`, `u_n = xy/(n(n+s))`, `s = x + y`, are summed
/// for `n <= N`. The remainder `T = sum_{n>N} ln(1+u_n)` is sandwiched by
///
/// ```text
/// xy ln(1 + s/(N+1))/s - (xy)^2/(6 N^3)  <=  T  <=  xy ln(1 + s/N)/s
/// ```
///
/// (integral comparison for the decreasing `u_n`, plus `u - u^2/2 <= ln(1+u) <= u`).
/// The midpoint of the sandwich is applied to the truncated product, and the
/// half-width `h` gives the certified bound `value * expm1(h)`. Factors are
/// added until that bound falls below `1e-10 * value`.
pub fn beta_product(x: f64, y: f64, max_factors: usize) -> Result<SeriesEvaluation> {
    check_args(x, y, "beta_product")?;
    if max_factors == 0 {
        return domain("beta_product requires max_factors >= 1");
    }
    let s = x + y;
    let xy = x * y;
    let prefactor_ln = s.ln() - x.ln() - y.ln();
    let mut log_sum = CompensatedSum::new(0.0);
    for n in 1..=max_factors {
        let nf = n as f64;
        log_sum.add((xy / (nf * (s + nf))).ln_1p());

        let upper = xy * (s / nf).ln_1p() / s;
        let lower = xy * (s / (nf + 1.0)).ln_1p() / s - xy * xy / (6.0 * nf * nf * nf);
        let half_width = 0.5 * (upper - lower);
        let value = (prefactor_ln - log_sum.value() - 0.5 * (upper + lower)).exp();
        let tail_bound = value * half_width.exp_m1();
        if tail_bound < PRODUCT_REL_TARGET * value {
            return Ok(SeriesEvaluation {
                value,
                terms_used: n,
                tail_bound,
            });
        }
    }
    Err(Error::NonConvergence {
        what: format!("beta_product({x}, {y}) tail bound above {PRODUCT_REL_TARGET:e} relative"),
        terms: max_factors,
    })
}
