//! Exact homology of spaces of polynomial tuples without common roots of
//! high multiplicity, of spaces of based rational maps, and of the double
//! loop space they stabilize to, together with arithmetic and algebraic
//! cross-checks.

pub mod arith;
pub mod braid;
pub mod error;
pub mod exactalg;
pub mod jet;
pub mod polyspaces;
pub mod verify;

pub use error::{Error, Result};
pub use exactalg::{AbelianGroup, GradedAbelianGroup, Ring};
