//! Cohomology numerology and certified verification of Ulrich bundles on
//! projective space under Veronese embeddings.
//!
//! Everything is exact: rationals are arbitrary precision and every rank is
//! computed over the rationals.

pub mod arith;
pub mod gallery;
pub mod groebner;
pub mod linalg;
pub mod numerology;
pub mod poly;
pub mod resolution;
pub mod search;

pub use arith::{gen_binomial, Rational};
pub use linalg::RatMatrix;
pub use poly::{HomPoly, LinearMatrix, Monomial, PolyMatrix};
