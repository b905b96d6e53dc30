//! Polynomial invariants of multipartite quantum states.
//!
//! A density operator on `H_1 ⊗ ⋯ ⊗ H_n` is expanded in a tensor-product basis of
//! Hermitian operators (generalized Gell-Mann matrices normalized to
//! `tr(σ_i σ_j) = d δ_ij`). The coefficients form a hypermatrix of format
//! `d_1² × ⋯ × d_n²`, and local operations `ρ ↦ gρg†` act on it by mode products
//! with real induced matrices. Invariants are then built from determinants,
//! characteristic polynomials and Cayley's two hyperdeterminants of that tensor.
//!
//! Modules:
//!
//! - [`matrix`] and [`hypermatrix`]: dense complex arithmetic, mode products,
//!   column realignment, Kronecker products, the paired identity tensor.
//! - [`bloch`]: Gell-Mann bases, Bloch representation, induced matrices,
//!   local operations and basis rotations.
//! - [`hyperdet`]: the first hyperdeterminant by pruned permutation search, the
//!   2×2×2 second hyperdeterminant, characteristic polynomials.
//! - [`invariants`]: named invariant fingerprints and their comparison.
//! - [`sampling`] and [`audit`]: seeded random states and local groups, and the
//!   empirical invariance audit.
//! - [`io`]: JSON state files, fingerprint serialization and number formatting.
//!
//! Directions and indices are 0-based throughout the API.

pub mod audit;
pub mod bloch;
mod error;
pub mod hyperdet;
pub mod hypermatrix;
pub mod invariants;
pub mod io;
pub mod matrix;
pub mod sampling;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bloch::{BlochBasis, DensityState, GroupTag, InducedMatrix, LocalOperatorChain, PureState, State};
pub use hyperdet::{HdetConfig, LambdaPolynomial};
pub use hypermatrix::HyperMatrix;
pub use invariants::InvariantFingerprint;
pub use matrix::Matrix;

/// Shorthand for a complex number with real part `re` and imaginary part `im`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
