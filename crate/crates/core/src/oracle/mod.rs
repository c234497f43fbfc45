//! Independent ground truth for the closed forms: Monte Carlo sampling,
//! nested adaptive quadrature and Wick pairing enumeration.
//!
//! None of these routines touch the hypergeometric series.

mod isserlis;
mod monte_carlo;
mod quadrature;

pub use isserlis::{isserlis_even_moment, isserlis_pairing_counts, MAX_PAIRING_ORDER};
pub use monte_carlo::{mc_joint_moment, mc_joint_moments, McEstimate, MC_BLOCK_SIZE, MIN_MC_SAMPLES};
pub use quadrature::{
    integrate, quad_joint_moment, quad_marginal_moment, QuadratureEstimate, MAX_SUBDIVISIONS,
    QUAD_RHO_MAX,
};
