//! Grothendieck ring of algebraic stacks, computed.
//!
//! Classes live in `Z[L, L^-1]` localised at every `L^n - 1` ([`lring`]),
//! expand into the dimension completion ([`completed`]), carry weight bounds
//! ([`weights`]) and torsion Euler characteristics ([`torsion`]). The
//! [`fforacle`] module counts points over finite fields by brute force and is
//! the ground truth that the symbolic side is checked against.

pub mod arith;
pub mod bun;
pub mod catalog;
pub mod completed;
pub mod error;
pub mod expr;
pub mod fforacle;
pub mod lring;
pub mod torsion;
pub mod weights;

pub use error::{Error, Result};
