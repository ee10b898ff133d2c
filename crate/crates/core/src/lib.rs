//! Finite category engine for abstract Kleisli structures.
//!
//! The crate works with categories and strict 2-categories presented by
//! finite composition tables. On top of that it provides monads and
//! pseudomonads, thunkable morphisms and thunkings, descent cones, and
//! checkers that decide the codescent and isobidescent conditions by
//! exhaustive enumeration.

pub mod abskl1;
pub mod abskl2;
pub mod corpus;
pub mod error;
pub mod fincat;
pub mod guard;
pub mod instances;
pub mod klext;
pub mod monadkit;
pub mod pexpr;
pub mod pseudomonadkit;
pub mod report;
pub mod twocat;

pub use error::{Error, Result};
pub use guard::Guard;
pub use report::{ValidationReport, Violation};
