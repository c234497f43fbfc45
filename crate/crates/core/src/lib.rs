//! Exact absolute moments of centered bivariate Gaussian pairs, and a harness
//! that certifies the bivariate Gaussian product inequality (same-sign
//! exponents), its opposite (opposite-sign exponents) and the one-dimensional
//! analogues.
//!
//! The crate is organised bottom-up:
//!
//! - [`special_fn`]: log-gamma, gamma, Beta (direct and infinite product),
//!   double factorial and the Gauss hypergeometric series `2F1`.
//! - [`moments`]: marginal and joint absolute moments, the moment ratio
//!   `G(rho^2)`, the even-exponent closed form and the 1-D Beta ratio.
//! - [`verify`]: regime classification, inequality verdicts and sweeps.
//! - [`oracle`]: Monte Carlo, nested adaptive quadrature and Wick pairing
//!   enumeration, used as independent ground truth.
//! - [`cli`]: the `gpi` command-line front end.

pub mod cli;
pub mod error;
pub mod moments;
pub mod oracle;
pub mod special_fn;
pub mod verify;

pub use error::{Error, Result};
