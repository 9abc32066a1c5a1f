//! Finite-temperature topological invariants of one-dimensional chiral
//! fermion chains.
//!
//! The crate evaluates the kinematic mixed-state geometric phase of the
//! thermal one-body density matrix of two-band chiral models (SSH chain and
//! Creutz ladder), the underlying winding number and Zak phases, and the
//! edge/bulk occupation contrasts of open chains that signal mixed edge
//! states at nonzero temperature.

pub mod cli;
pub mod edgemetrics;
pub mod error;
pub mod mixedphase;
pub mod models;
pub mod numerics;
pub mod selftest;
pub mod topology;

pub use error::{Error, Result};
