//! Exact computations for Hermitian lattices over a ramified quadratic extension
//! of `Q_p`: local density polynomials, derived densities, and the vertex-lattice
//! combinatorics that computes intersection numbers for rank at most three.

pub mod density;
pub mod ff;
pub mod lattice;
pub mod kr;
pub mod local_ring;
pub mod tree;

pub use lattice::{Gram, LatticeInvariants};
pub use local_ring::{Ext, Extended, RingConfig, Twist, Q};

/// `Extended` over exact rationals, the scalar used throughout.
pub type Scalar = Extended<num::BigRational>;
