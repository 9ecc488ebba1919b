//! Exact lattice arithmetic for Heegner divisors, Kudla special cycles and
//! the irrationality bounds for moduli of polarized K3 surfaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`], [`named`], [`discriminant`], [`enumerate`]: even lattices,
//!   discriminant forms, levels, complements and short-vector enumeration.
//! - [`weil`]: the Weil representation on `C[D(M)]` and its `SL2(Z)` relations.
//! - [`heegner`]: Heegner and Kudla cycle indices for the cubic, Gushel-Mukai,
//!   hyperkähler and uniform K3 families, with their lattice witnesses.
//! - [`arith`], [`bounds`]: admissibility tests, growth inequalities and
//!   per-genus bound certificates.

pub mod error;
pub mod matrix;
pub mod snf;
pub mod lattice;
pub mod named;
pub mod discriminant;
pub mod enumerate;
pub mod weil;
pub mod heegner;
pub mod arith;
pub mod bounds;
pub mod report;

pub use error::{Error, Result};
