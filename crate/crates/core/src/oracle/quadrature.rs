//! Adaptive Gauss-Kronrod (7/15) quadrature and the nested integral for
//! `E|X1|^a1 |X2|^a2`.
//!
//! With `X1 = U1`, `X2 = rho U1 + s U2`, `s = sqrt(1 - rho^2)`:
//!
//! ```text
//! E|X1|^a1 |X2|^a2 = 2 int_0^inf x^a1 phi(x) g(x) dx,
//! g(x) = E|rho x + s U2|^a2 = int_0^inf y^a2 [phi((y-mu)/s) + phi((y+mu)/s)] / s dy,  mu = |rho x|
//! ```
//!
//! The `|t|^a` singularity at the origin (for `a < 0`) is removed on the
//! interval touching zero by `t = u^(1/(1+a))`, which turns `t^a dt` into
//! `du/(1+a)`. Both integrals are cut at 40 standard deviations and a Gaussian
//! tail bound is added to the error estimate.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::moments::{BivariatePairSpec, ExponentPair};

pub const MAX_SUBDIVISIONS: usize = 2000;

/// Largest `|rho|` accepted by [`quad_joint_moment`].
pub const QUAD_RHO_MAX: f64 = 0.999;

const CUTOFF_SIGMAS: f64 = 40.0;
const MIN_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Subdivisions used by the outer integral.
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut error = ((resk - resg) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Segment { a, b, value, error }
}

/// Globally adaptive integration of `f` over `[a, b]`, bisecting the segment
/// with the largest error until the total error estimate is at most
/// `max(abs_tol, rel_tol |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    if !(a.is_finite() && b.is_finite()) {
        return domain(format!("integration limits must be finite, got [{a}, {b}]"));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, a, b);
    let (mut value, mut error) = (first.value, first.error);
    heap.push(first);
    let mut subdivisions = 1;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NonConvergence {
                what: format!("integrand not finite on [{a}, {b}]"),
                terms: subdivisions,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            break;
        }
        if subdivisions >= MAX_SUBDIVISIONS {
            return Err(Error::NonConvergence {
                what: format!("quadrature on [{a}, {b}] stalled at error {error:e}"),
                terms: subdivisions,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }
    // Re-add from the segments to shed drift from the running updates.
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(QuadratureEstimate {
        value,
        abs_error_estimate: error,
        subdivisions,
    })
}

/// `int_0^upper t^alpha w(t) dt` for smooth `w`, removing the origin
/// singularity by substitution when `alpha < 0`.
fn power_weighted<F: Fn(f64) -> f64>(
    alpha: f64,
    w: F,
    upper: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    if alpha < 0.0 {
        let p = 1.0 / (1.0 + alpha);
        integrate(
            |u: f64| p * w(u.powf(p)),
            0.0,
            upper.powf(1.0 + alpha),
            abs_tol,
            rel_tol,
        )
    } else if alpha == 0.0 {
        integrate(w, 0.0, upper, abs_tol, rel_tol)
    } else {
        integrate(|t: f64| t.powf(alpha) * w(t), 0.0, upper, abs_tol, rel_tol)
    }
}

fn plain_power<F: Fn(f64) -> f64>(
    alpha: f64,
    w: F,
    lo: f64,
    hi: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    if alpha == 0.0 {
        integrate(w, lo, hi, abs_tol, rel_tol)
    } else {
        integrate(|t: f64| t.powf(alpha) * w(t), lo, hi, abs_tol, rel_tol)
    }
}

fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Bound on `int_U^inf u^beta phi(u) du`, valid when `beta - 1 <= U^2 / 2`.
fn gaussian_power_tail(beta: f64, cutoff: f64) -> f64 {
    2.0 * ((beta - 1.0) * cutoff.ln() - 0.5 * cutoff * cutoff).exp() / (2.0 * PI).sqrt()
}

fn sum(parts: &[QuadratureEstimate]) -> QuadratureEstimate {
    parts.iter().fold(
        QuadratureEstimate {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        },
        |acc, p| QuadratureEstimate {
            value: acc.value + p.value,
            abs_error_estimate: acc.abs_error_estimate + p.abs_error_estimate,
            subdivisions: acc.subdivisions + p.subdivisions,
        },
    )
}

/// `E|mu + s U|^alpha` for standard Gaussian `U`, by quadrature.
fn shifted_abs_moment(alpha: f64, mu: f64, s: f64, rel_tol: f64) -> Result<QuadratureEstimate> {
    let mu = mu.abs();
    let w = |y: f64| (phi((y - mu) / s) + phi((y + mu) / s)) / s;
    let end = mu + CUTOFF_SIGMAS * s;
    let abs_tol = 0.0;
    let parts = if mu > 2.0 * s {
        let near = power_weighted(alpha, w, 0.5 * mu, abs_tol, rel_tol)?;
        let rise = plain_power(alpha, w, 0.5 * mu, mu, abs_tol, rel_tol)?;
        let fall = plain_power(alpha, w, mu, end, abs_tol, rel_tol)?;
        [near, rise, fall]
    } else {
        let near = power_weighted(alpha, w, mu + s, abs_tol, rel_tol)?;
        let fall = plain_power(alpha, w, mu + s, end, abs_tol, rel_tol)?;
        let empty = QuadratureEstimate {
            value: 0.0,
            abs_error_estimate: 0.0,
            subdivisions: 0,
        };
        [near, fall, empty]
    };
    let mut total = sum(&parts);
    // y = mu + s u with u >= 40: y^alpha <= (mu + s)^alpha u^alpha for alpha >= 0,
    // and <= (s u)^alpha for alpha < 0. Factor 2 covers the mirrored density.
    let scale = if alpha >= 0.0 { (mu + s).powf(alpha) } else { s.powf(alpha) };
    total.abs_error_estimate += 2.0 * scale * gaussian_power_tail(alpha, CUTOFF_SIGMAS);
    Ok(total)
}

/// `E|sigma U|^nu` by quadrature.
pub fn quad_marginal_moment(nu: f64, sigma: f64, rel_tol: f64) -> Result<QuadratureEstimate> {
    if !(nu > -1.0 && nu.is_finite()) {
        return domain(format!("E|U|^nu diverges unless nu > -1, got {nu}"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return domain(format!("sigma must be finite and > 0, got {sigma}"));
    }
    check_rel_tol(rel_tol)?;
    let mut est = shifted_abs_moment(nu, 0.0, 1.0, rel_tol)?;
    let scale = sigma.powf(nu);
    est.value *= scale;
    est.abs_error_estimate *= scale;
    Ok(est)
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol >= MIN_REL_TOL && rel_tol < 1.0) {
        return domain(format!(
            "rel_tol must lie in [{MIN_REL_TOL:e}, 1), got {rel_tol}"
        ));
    }
    Ok(())
}

/// `E|X1|^a1 |X2|^a2` as a nested integral over the Gaussian density.
pub fn quad_joint_moment(
    pair: ExponentPair,
    spec: BivariatePairSpec,
    rel_tol: f64,
) -> Result<QuadratureEstimate> {
    check_rel_tol(rel_tol)?;
    let rho = spec.rho();
    if !(rho.abs() <= QUAD_RHO_MAX) {
        return domain(format!("quadrature needs |rho| <= {QUAD_RHO_MAX}, got {rho}"));
    }
    let (a1, a2) = (pair.alpha1(), pair.alpha2());
    let s = (1.0 - rho * rho).sqrt();
    let inner_tol = (rel_tol * 1e-3).max(1e-13);

    // Worst relative error reported by any inner integral.
    let inner_rel_err = Cell::new(0.0_f64);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let g = |x: f64| -> f64 {
        match shifted_abs_moment(a2, rho * x, s, inner_tol) {
            Ok(est) => {
                if est.value != 0.0 {
                    let r = est.abs_error_estimate / est.value.abs();
                    inner_rel_err.set(inner_rel_err.get().max(r));
                }
                est.value
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let w = |x: f64| 2.0 * phi(x) * g(x);

    let near = power_weighted(a1, w, 1.0, 0.0, rel_tol * 0.25);
    let far = plain_power(a1, w, 1.0, CUTOFF_SIGMAS, 0.0, rel_tol * 0.25);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let mut total = sum(&[near?, far?]);
    total.abs_error_estimate += inner_rel_err.get() * total.value.abs();

    // g(x) <= x^a2 2^a2 (1 + E|U|^a2) for a2 >= 0 and x >= 1, and
    // g(x) <= s^a2 E|U|^a2 for a2 < 0.
    let m2 = crate::moments::marginal_abs_moment(a2, 1.0)?.value;
    let tail = if a2 >= 0.0 {
        2.0 * 2f64.powf(a2) * (1.0 + m2) * gaussian_power_tail(a1 + a2, CUTOFF_SIGMAS)
    } else {
        2.0 * s.powf(a2) * m2 * gaussian_power_tail(a1, CUTOFF_SIGMAS)
    };
    total.abs_error_estimate += tail;

    let scale = (a1 * spec.sigma1().ln() + a2 * spec.sigma2().ln()).exp();
    total.value *= scale;
    total.abs_error_estimate *= scale;
    if total.abs_error_estimate > rel_tol * total.value.abs() {
        return Err(Error::NonConvergence {
            what: format!(
                "nested quadrature error {:e} above rel_tol {rel_tol:e}",
                total.abs_error_estimate / total.value.abs()
            ),
            terms: total.subdivisions,
        });
    }
    Ok(total)
}
