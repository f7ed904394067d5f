//! Exact calculator for virtual-invariant generating functions of twisted
//! sheaves on surfaces, twisted Chern characters, and `c₂^min` bounds for
//! Azumaya algebras.
//!
//! Everything is exact: coefficients live in cyclotomic fields, series are
//! truncated but never approximated, and lattice work is done over `Z`.

pub mod bounds;
pub mod chern;
pub mod cyclo;
pub mod error;
pub mod formulas;
pub mod lattice;
pub mod psu;
pub mod series;
pub mod surface;

pub use cyclo::CycloNumber;
pub use error::{Error, Result};

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;
