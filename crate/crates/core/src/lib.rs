//! Exact polytope-side invariants of toric manifolds.
//!
//! Starting from a Delzant polytope in half-space form, the crate computes
//! the average scalar curvature, Futaki vector, extremal affine potential
//! `θ_X`, the linear functional `L(u)` on convex piecewise-linear functions,
//! relative Futaki invariants of toric degenerations, lattice-sum checks,
//! and decides a family of sufficient conditions for relative K-stability
//! and properness of the modified K-energy.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the exact
//! rational instantiation used by the CLI and the float one used for
//! previews.

pub mod catalog;
pub mod geometry;
pub mod integration;
pub mod invariants;
pub mod linalg;
pub mod pl;
pub mod polynomial;
pub mod region;
pub mod report;
pub mod reproduce;
pub mod scalar;
pub mod search;
pub mod spec;

pub use scalar::{q, Rational, Scalar};

pub type ExactPolytope = geometry::Polytope<Rational>;
pub type FloatPolytope = geometry::Polytope<f64>;
pub type ExactPl = pl::PlFunction<Rational>;
pub type FloatPl = pl::PlFunction<f64>;
pub type ExactAffine = pl::AffineFunction<Rational>;
pub type ExactPolynomial = polynomial::Polynomial<Rational>;
pub type ExactExtremalData = invariants::ExtremalData<Rational>;
pub type FloatExtremalData = invariants::ExtremalData<f64>;
