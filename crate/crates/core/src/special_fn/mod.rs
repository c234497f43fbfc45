//! Scalar special functions on the real line.
//!
//! Everything here is pure and allocation-free. Series and products report
//! their truncation through [`SeriesEvaluation`].

mod beta;
mod gamma;
mod hypergeometric;

pub use beta::{beta, beta_product, ln_beta};
pub use gamma::{double_factorial, gamma, log_gamma};
pub use hypergeometric::{
    gauss_2f1, gpi_kernel_derivative, gpi_kernel_derivative_with_bound, HypergeometricInput,
    MAX_SERIES_TERMS, Z_MAX,
};

use serde::{Deserialize, Serialize};

/// Value of a truncated series or product together with a certified bound on
/// the truncation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvaluation {
    pub value: f64,
    /// Number of terms (or factors) that were accumulated, always at least 1.
    pub terms_used: usize,
    /// Upper bound on `|value - exact|` from truncation, finite and `>= 0`.
    pub tail_bound: f64,
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn new(init: f64) -> Self {
        Self { sum: init, comp: 0.0 }
    }

    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
