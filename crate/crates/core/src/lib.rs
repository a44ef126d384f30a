//! Exact-rational verification workbench for universal enveloping algebras.
//!
//! The crate works at finite truncation throughout: Lie algebras are given by
//! rational structure constants, `U(g)` is handled through PBW normal forms and
//! its weight-filtered quotients `U(g)/J_{W+1}`, and every (co)homology group is
//! computed from exact ranks. Nothing in here touches floating point.
//!
//! Module map:
//!
//! * [`lie`]: structure validation, central/derived series, Killing form,
//!   weight structures, endomorphism and contraction-family checks.
//! * [`pbw`]: PBW normal-form arithmetic and weight truncations.
//! * [`hopf`]: truncated Hopf quotients, axiom checks, the `Φ`/`Ψ` inverse
//!   pair and the Hochschild/Ext comparison.
//! * [`homology`]: Chevalley–Eilenberg and truncated Koszul complexes.
//! * [`poly`] and [`dual`]: the polynomial dual of `U(g)`, the dual action,
//!   parallelizability and the polynomial de Rham complex.
//! * [`weights`]: weight sequences, seminorms and homogeneous norms.
//! * [`specfile`] and [`suite`]: `.alg` parsing and the report-producing suites.

pub mod corpus;
pub mod dual;
pub mod homology;
pub mod hopf;
pub mod lie;
pub mod linalg;
pub mod pbw;
pub mod poly;
pub mod specfile;
pub mod suite;
pub mod weights;

pub use num_rational::BigRational as Rational;

use num_bigint::BigInt;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a reduced rational. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
