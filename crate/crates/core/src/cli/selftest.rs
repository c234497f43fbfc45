//! The `selftest` suite: default sweep, one-dimensional and monotonicity
//! checks, special-function identities and oracle cross-checks.
//!
//! Identity and oracle rows are emitted as verdict records with the computed
//! value as `ratio`, the reference as `threshold`, and `Equality` when they
//! agree within `inputs.tolerance` (relative), `Violated` otherwise.

use crate::moments::{
    even_exponent_ratio, joint_abs_moment, moment_ratio, BivariatePairSpec, ExponentPair,
};
use crate::oracle::{isserlis_even_moment, mc_joint_moment, quad_joint_moment};
use crate::special_fn::{beta, beta_product, gamma, gauss_2f1, HypergeometricInput, MAX_SERIES_TERMS};
use crate::verify::{
    check_monotonicity, check_one_dim, sweep, SweepGrid, Verdict, DEFAULT_TOLERANCE,
};
use crate::Result;

use super::output::{Inputs, Record};

const EXPONENTS: [f64; 7] = [-0.9, -0.5, -0.1, 0.5, 1.0, 2.0, 4.0];
const QUAD_REL_TOL: f64 = 1e-9;
const QUAD_AGREEMENT: f64 = 1e-7;
const MC_STANDARD_ERRORS: f64 = 4.0;

pub fn run(seed: u64, samples: u64) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    bivariate_sweep(&mut records)?;
    one_dim(&mut records)?;
    monotonicity(&mut records)?;
    identities(&mut records)?;
    quadrature(&mut records)?;
    monte_carlo(&mut records, seed, samples)?;
    Ok(records)
}

fn bivariate_sweep(records: &mut Vec<Record>) -> Result<()> {
    let report = sweep(&SweepGrid::selftest(), DEFAULT_TOLERANCE)?;
    if let Some(s) = report.skipped.first() {
        return crate::error::domain(format!(
            "selftest point alpha1={} alpha2={} rho={} failed: {}",
            s.alpha1, s.alpha2, s.rho, s.reason
        ));
    }
    records.extend(report.records.iter().map(|r| {
        let inputs = Inputs::new("bivariate").pair(r.alpha1, r.alpha2).rho(r.rho);
        Record::verdict(inputs, &r.verdict, "hypergeometric")
    }));
    Ok(())
}

fn one_dim(records: &mut Vec<Record>) -> Result<()> {
    for &a1 in &EXPONENTS {
        for &a2 in &EXPONENTS {
            // The ratio needs a1 + a2 > -1.
            if a1 + a2 <= -1.0 {
                continue;
            }
            let v = check_one_dim(a1, a2, DEFAULT_TOLERANCE)?;
            records.push(Record::verdict(Inputs::new("one_dim").pair(a1, a2), &v, "beta_ratio"));
        }
    }
    Ok(())
}

fn monotonicity(records: &mut Vec<Record>) -> Result<()> {
    const PAIRS: [(f64, f64); 12] = [
        (-0.9, 0.5),
        (-0.5, 2.0),
        (-0.1, 4.0),
        (0.5, -0.5),
        (-0.9, -0.9),
        (-0.5, -0.1),
        (-0.1, -0.5),
        (0.5, 0.5),
        (1.0, 2.0),
        (2.0, 4.0),
        (4.0, 4.0),
        (1.0, 0.5),
    ];
    let zs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    for (a1, a2) in PAIRS {
        let v = check_monotonicity(ExponentPair::new(a1, a2)?, &zs)?;
        let mut inputs = Inputs::new("monotonicity").pair(a1, a2);
        inputs.grid = Some("0.1:0.9:0.1".into());
        records.push(Record::verdict(inputs, &v, "kernel_derivative"));
    }
    Ok(())
}

/// `value` against `reference` within a relative tolerance.
fn agreement(inputs: Inputs, value: f64, reference: f64, rel_tol: f64, error_bound: f64, method: &str) -> Record {
    let margin = value - reference;
    let ok = margin.abs() <= rel_tol * reference.abs();
    let mut inputs = inputs;
    inputs.tolerance = Some(rel_tol);
    Record {
        inputs,
        ratio: value,
        threshold: Some(reference),
        margin: Some(margin),
        verdict: Some(if ok { Verdict::Equality } else { Verdict::Violated }),
        error_bound,
        method: method.to_string(),
        variance_finite: None,
    }
}

fn identities(records: &mut Vec<Record>) -> Result<()> {
    // Euler transformation, both sides as plain series (z <= 0.7).
    for a in [-0.45, -0.25, 0.3, 1.5] {
        for b in [-0.35, 0.2, 2.0] {
            for z in [0.1, 0.5, 0.7] {
                let c = 0.5;
                let lhs = gauss_2f1(HypergeometricInput::new(a, b, c, z)?)?;
                let rhs = gauss_2f1(HypergeometricInput::new(c - a, c - b, c, z)?)?;
                let rhs = (1.0 - z).powf(c - a - b) * rhs.value;
                let mut inputs = Inputs::new("identity_euler").pair(a, b);
                inputs.z = Some(z);
                records.push(agreement(inputs, lhs.value, rhs, 1e-9, lhs.tail_bound, "series"));
            }
        }
    }
    for x in [0.5, 1.0, 2.5, 5.0] {
        for y in [0.5, 1.0, 2.5, 5.0] {
            let p = beta_product(x, y, MAX_SERIES_TERMS)?;
            let inputs = Inputs::new("identity_beta_product").pair(x, y);
            records.push(agreement(inputs, p.value, beta(x, y)?, 1e-8, p.tail_bound, "product"));
        }
    }
    for x in [0.1, 0.5, 1.5, 3.7, 10.2, 50.5, 120.25] {
        let mut inputs = Inputs::new("identity_gamma_recurrence");
        inputs.nu = Some(x);
        records.push(agreement(inputs, gamma(x + 1.0)?, x * gamma(x)?, 1e-12, 0.0, "lanczos"));
    }
    for a1 in [-0.5, 0.5, 1.5] {
        for m in 1..=3u32 {
            for rho in [0.3, 0.9] {
                let finite = even_exponent_ratio(a1, m, rho)?;
                let series = moment_ratio(ExponentPair::new(a1, 2.0 * m as f64)?, rho)?;
                let mut inputs = Inputs::new("identity_even_exponent").rho(rho);
                inputs.alpha1 = Some(a1);
                inputs.m = Some(m);
                records.push(agreement(inputs, finite, series, 1e-9, 0.0, "closed_form"));
            }
        }
    }
    for (p, q) in [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (1, 5)] {
        for rho in [-0.7, 0.4, 0.9] {
            let pair = ExponentPair::new(2.0 * p as f64, 2.0 * q as f64)?;
            let joint = joint_abs_moment(pair, BivariatePairSpec::standard(rho)?)?;
            let exact = isserlis_even_moment(p, q, rho)?;
            let mut inputs = Inputs::new("identity_isserlis").rho(rho);
            inputs.p = Some(p);
            inputs.q = Some(q);
            records.push(agreement(inputs, joint.value, exact, 1e-10, joint.error_bound, joint.method.as_str()));
        }
    }
    Ok(())
}

fn quadrature(records: &mut Vec<Record>) -> Result<()> {
    for a1 in [-0.5, 0.5, 2.0] {
        for a2 in [-0.9, 1.0, 4.0] {
            for rho in [0.0, 0.5, -0.9] {
                let pair = ExponentPair::new(a1, a2)?;
                let spec = BivariatePairSpec::standard(rho)?;
                let quad = quad_joint_moment(pair, spec, QUAD_REL_TOL)?;
                let closed = joint_abs_moment(pair, spec)?;
                let inputs = Inputs::new("oracle_quad").pair(a1, a2).rho(rho);
                records.push(agreement(inputs, quad.value, closed.value, QUAD_AGREEMENT, quad.abs_error_estimate, "quadrature"));
            }
        }
    }
    Ok(())
}

fn monte_carlo(records: &mut Vec<Record>, seed: u64, samples: u64) -> Result<()> {
    for (a1, a2, rho) in [(0.5, 1.0, 0.5), (-0.25, 2.0, -0.9), (1.0, 1.0, 0.9975), (2.0, 4.0, 0.0)] {
        let pair = ExponentPair::new(a1, a2)?;
        let spec = BivariatePairSpec::standard(rho)?;
        let est = mc_joint_moment(pair, spec, samples, seed)?;
        let closed = joint_abs_moment(pair, spec)?.value;
        let band = MC_STANDARD_ERRORS * est.std_error;
        let margin = est.mean - closed;
        let mut inputs = Inputs::new("oracle_mc").pair(a1, a2).rho(rho);
        inputs.samples = Some(samples);
        inputs.seed = Some(seed);
        inputs.tolerance = Some(band);
        records.push(Record {
            inputs,
            ratio: est.mean,
            threshold: Some(closed),
            margin: Some(margin),
            verdict: Some(if margin.abs() <= band { Verdict::Equality } else { Verdict::Violated }),
            error_bound: est.std_error,
            method: "monte_carlo".into(),
            variance_finite: Some(est.variance_finite),
        });
    }
    Ok(())
}
