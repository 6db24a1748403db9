//! Computational tools for the lattice point discrepancy of smooth convex
//! bodies of revolution in three dimensions.

pub mod arith;
pub mod body;
pub mod config;
pub mod error;
pub mod lattice;
pub mod lemma;
pub mod numeric;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
