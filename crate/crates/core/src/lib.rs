//! Classification of one-dimensional symmetry-protected topological states.
//!
//! The crate computes `H²(G, U(1))` for finite groups, extracts edge projective
//! representations from symmetric uniform matrix product states, constructs
//! fixed-point states realizing any class, and provides the finite-size
//! charge-transfer circuit and locality (F-function) machinery.

pub mod charge;
pub mod circuit;
pub mod cohomology;
pub mod detector;
pub mod error;
pub mod factory;
pub mod group;
pub mod index;
pub mod io;
pub mod linalg;
pub mod locality;
pub mod mps;
pub mod phase;
pub mod projrep;
pub mod verify;
pub mod zmod;

pub use charge::Charge;
pub use cohomology::{Cocycle, CohomologyClass, H2Group};
pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use index::{compute_index, EdgeRep, SPTIndexResult};
pub use mps::SymmetricMPS;
pub use phase::PhaseValue;
pub use projrep::MultiplierRep;
