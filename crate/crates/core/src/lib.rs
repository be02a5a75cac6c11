//! Exact topological recursion and x-y duality over the rationals.

pub mod arith;
pub mod error;
pub mod series;
pub mod curves;
pub mod tr;
pub mod xy;
pub mod invariants;

pub use arith::Q;
pub use error::{Error, Result};
