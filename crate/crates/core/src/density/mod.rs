//! Local densities: a counting oracle, interpolated density polynomials, and
//! closed-form evaluators.

pub mod alpha;
pub mod backtrack;
pub mod closed;
pub mod engine;
pub mod oracle;
pub mod poly;

use thiserror::Error;

use crate::lattice::LatticeError;

pub use oracle::{count_reps, count_reps_primitive, count_series, CountOptions, Mode, RepCount};
pub use alpha::{alpha_poly, alpha_poly_with, alpha_prime, beta_poly, beta_prim_poly, beta_strata, AlphaOptions};
pub use closed::{closed_alpha, ClosedValue, Formula};
pub use engine::Engine;
pub use poly::{qpow, DensityPoly};

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    Budget { needed: u64, budget: u64 },
    #[error("level d must be positive")]
    BadLevel,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("interpolation did not stabilize up to degree {0}")]
    NoStabilization(usize),
    #[error("count overflowed")]
    Overflow,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}
