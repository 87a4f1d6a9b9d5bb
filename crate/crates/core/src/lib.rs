//! Exact computational toolkit for algebraic supergeometry.
//!
//! The crate is organised bottom-up:
//!
//! * [`superalgebra`] – supercommutative Laurent polynomials over ℚ, ring
//!   homomorphisms, super matrices and Berezinians.
//! * [`homological`] – odd derivations, homological vector fields, freeness
//!   certificates and invariant subrings.
//! * [`atlas`] – superschemes glued from affine charts: projective
//!   superspaces, supergrassmannians, quotient atlases, truncations,
//!   isomorphism search and `A^{0|1}`-fibrations.
//! * [`linebundle`] – line-bundle cocycles, v-connections, curvature,
//!   descent and the odd Heisenberg group `GQ(1)`.
//! * [`cohomology`] – the Bott formula, Künneth tables, associated-graded
//!   pieces of `G(1|1,n|n)` and a windowed Čech engine.
//! * [`criteria`] – a forward-chaining engine over provenance-tagged facts
//!   that reproduces embeddability verdicts with proof traces.
//! * [`oracle`] – deliberately naive brute-force cross-checks.

pub mod atlas;
pub mod cohomology;
pub mod criteria;
pub mod error;
pub mod homological;
pub mod linalg;
pub mod linebundle;
pub mod oracle;
pub mod rational;
pub mod superalgebra;

pub use error::{Error, Result};
pub use rational::Q;
pub use superalgebra::{Monomial, OddSet, Parity, Ring, RingDescriptor, SuperMatrix, SuperPoly};
