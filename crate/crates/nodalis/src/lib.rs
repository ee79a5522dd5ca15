//! Exact combinatorics and intersection calculus behind universal nodal-curve
//! counting polynomials.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: admissible graphs, type-I exceptional classes, degenerations.
//! * [`lattice`]: pairings against `C - M(E)E`, exceptional cones, `Δ(n)`.
//! * [`orderings`]: the orderings `≻`, `≫`, `⊐`, `⊨`, `⊢` and index sets.
//! * [`chow`]: graded expressions on the universal space `M_n`, blowdown
//!   pushforward, stratum classes and the obstruction bundle.
//! * [`tau`]: tau classes, mixed invariants, the modified recursion and node
//!   counts.
//! * [`oracle`]: independent evaluators and the self-check suite.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the exact
//! rational instance used by the binary and the tests.

pub mod chow;
pub mod config;
pub mod graph;
pub mod lattice;
pub mod oracle;
pub mod orderings;
pub mod poly;
pub mod scalar;
pub mod tau;

pub use graph::{AdmissibleGraph, ExcClass, GraphError};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Universal polynomial in `(L², L·K, K², c₂)` over the rationals.
pub type UniversalPoly = poly::UPoly<Rational>;
/// Chow expression on `M_n` over the rationals.
pub type ChowExpr = chow::Expr<Rational>;
/// Exceptional cone over the rationals.
pub type ExcCone = lattice::Cone;

/// Shorthand for building a rational from an integer.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}
