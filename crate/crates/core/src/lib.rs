//! Restricted sumsets over finitely generated abelian groups and finite
//! fields, executable lower-bound checks, exhaustive sweeps, and a
//! constructive Combinatorial Nullstellensatz.

mod arith;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod field;
pub mod group;
pub mod poly;
pub mod search;
pub mod sumsets;

pub use error::{Error, Result};
