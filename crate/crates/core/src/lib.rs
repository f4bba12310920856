//! Minimum-matches heat exchanger network synthesis with exact arithmetic.
//!
//! The crate covers the transshipment formulation end to end: interval
//! construction and utility targeting ([`lp`]), the fixed-interval and full
//! match MILPs with an exact branch-and-bound and solution pool ([`milp`]),
//! and the permutation symmetry of equivalent streams ([`symmetry`]).
//! Everything is generic over [`Scalar`]; [`Rational`] is the exact default.

pub mod io;
pub mod lp;
pub mod milp;
pub mod model;
pub mod replication;
pub mod scalar;
pub mod symmetry;

pub use num_bigint::BigUint;
pub use scalar::Scalar;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub type Instance = model::HensInstance<Rational>;
pub type Interval = model::IntervalProblem<Rational>;
pub type Model = milp::MilpModel<Rational>;
pub type Solution = model::MatchSolution<Rational>;
pub type Optima = milp::OptimaSet<Rational>;
pub type Group = symmetry::SymmetryGroup<Rational>;
