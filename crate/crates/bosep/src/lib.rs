//! Separability analysis for pure states of two or three indistinguishable bosons.
//!
//! A single-particle state `φ` counts as a *complete set of properties* of a bosonic
//! pure state `ψ` when the symmetrized projector built from `P = |φ⟩⟨φ|` has unit
//! expectation, i.e. when the residual `‖(I−P)⊗…⊗(I−P) ψ‖²` vanishes. Everything in
//! this crate is organized around that criterion:
//!
//! - [`symstate`]: permutation-symmetric state tensors and basic operations
//!   (symmetrization, symmetrized products, basis changes, partial trace).
//! - [`properties`]: expectation profiles of the symmetrized projectors
//!   (exactly one / exactly two / all three particles carry `P`).
//! - [`propsearch`]: finding all properties of a state, exactly for qubits via
//!   cubic root extraction and numerically via seeded multi-start minimization.
//! - [`decompose`]: cofactor extraction, Takagi factorization of two-boson
//!   amplitude matrices, and recovery of constituent vectors.
//! - [`classify`]: the five-class separability taxonomy and the decision ladder.
//! - [`catalog`]: named reference states used throughout the test suite.
//! - [`cli`]: the state-file / report-file formats and the `bosep` command set.
//!
//! The [`oracle`] module holds deliberately naive dense reference implementations;
//! the test suite uses them as an independent check on the fast paths.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod decompose;
mod error;
pub mod oracle;
pub mod properties;
pub mod propsearch;
pub mod symstate;

pub use error::{Error, Result};

/// Version string embedded in emitted reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
