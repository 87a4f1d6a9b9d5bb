//! Supercommutative Laurent polynomial rings over ℚ.
//!
//! A ring is described by ordered lists of even and odd generators; some even
//! generators may be declared invertible (Laurent directions) and the whole
//! ring may be truncated modulo `N^k`, the `k`-th power of the ideal generated
//! by odd generators. Elements are kept in a canonical sign-normalised form so
//! that equality is structural.

mod doc;
mod hom;
mod matrix;
mod parse;
mod monomial;
mod poly;
mod ring;

pub use doc::{poly_to_terms, terms_to_poly, PolyDoc, RingDoc, TermDoc};
pub use hom::RingHom;
pub use matrix::{det_commutative, invert_commutative, SuperMatrix};
pub use monomial::{Monomial, OddSet};
pub use poly::SuperPoly;
pub use ring::{GenRef, Ring, RingDescriptor};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_count(n: u32) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn add(self, other: Parity) -> Self {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// `(-1)^{self}` as an integer.
    pub fn sign(self) -> i64 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}
