//! Exact computations for the principal block of category O of a small-rank
//! semisimple Lie algebra: Weyl groups, Kazhdan–Lusztig polynomials,
//! Gelfand–Kirillov dimensions, central-charge polynomials, and checks of the
//! axioms of a real variation of stability conditions.

pub mod charge;
pub mod error;
pub mod ktheory;
pub mod linalg;
pub mod polyengine;
pub mod rootsys;
pub mod rvsc;
pub mod stab;
pub mod weylkl;

pub use error::{Error, Result};

/// Exact rationals used for every numeric quantity.
pub type Q = num_rational::BigRational;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}
