//! Bilateral weighted shifts, weak-closure certificates and measures on the circle.
//!
//! All weight products are carried as base-2 logarithms ([`lattice::LogMag`]);
//! verdicts over finite horizons are reported with their evidence and never
//! claimed as proofs.

pub mod closure;
pub mod criteria;
pub mod error;
pub mod lattice;
pub mod measure;

pub use error::{Error, Result};
