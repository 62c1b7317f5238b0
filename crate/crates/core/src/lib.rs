// SPDX-License-Identifier: Apache-2.0
//! Exact computations in the tropical vertex group.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`] and [`lattice`]: truncated formal power series over `Q` with
//!   Laurent monomials `z^m`, and the lattice `M = Z^2`;
//! * [`vertex`]: log derivations, their bracket, wall-crossing automorphisms
//!   and the decomposition of group elements into `c z^m d_n` terms;
//! * [`scattering`]: walls, diagrams, path-ordered products, consistent
//!   completion at the origin and the perturbation/collision algorithm;
//! * [`tropical`]: tropical curves read off perturbed diagrams and the
//!   tropical counts they produce;
//! * [`invariants`]: commutator coefficients, relative invariants of blown-up
//!   toric surfaces, multiple-cover contributions and BPS numbers.

pub mod error;
pub mod invariants;
pub mod lattice;
pub mod rational;
pub mod scattering;
pub mod series;
pub mod tropical;
pub mod verify;
pub mod vertex;

pub use error::{Error, Result};
pub use lattice::LatticeVector;
pub use rational::Q;
pub use series::{Monomial, RingContext, TruncatedSeries, Variable};
