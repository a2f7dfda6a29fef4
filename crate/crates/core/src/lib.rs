//! Exact online fair division.
//!
//! Indivisible items arrive one at a time and are allocated on arrival to
//! agents with additive utilities. This crate runs six online mechanisms
//! exactly (distributions over allocations with rational probabilities) and
//! checks them against strategy-proofness, envy-freeness and Pareto
//! efficiency at desk scale.

pub mod axioms;
pub mod cli;
pub mod error;
pub mod instances;
pub mod mechanisms;
pub mod model;
pub mod oracle;
pub mod simplex;
pub mod strategic;

pub use error::{Error, Result};
