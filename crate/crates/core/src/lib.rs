//! Entanglement measures and LOCC-optimized quantum Fisher information for
//! two-qubit states.
//!
//! The crate computes concurrence, negativity and the relative entropy of
//! entanglement of random two-qubit density matrices, maximizes and minimizes
//! their mean quantum Fisher information over local Euler rotations, and
//! classifies pairs of states by how the two orderings agree.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod locc;
pub mod measures;
pub mod ordering;
pub mod qcore;
pub mod qfi;
pub mod randgen;

pub use error::{Error, Result};
