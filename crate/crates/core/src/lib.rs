//! Positive infinitary formulas over atomic diagrams of countable structures.

pub mod acceptance;
pub mod coding;
pub mod corpus;
pub mod enum_ops;
pub mod error;
pub mod family;
pub mod forcing;
pub mod formula;
pub mod linorder;
pub mod nformula;
pub mod pullback;
pub mod semantics;
pub mod structures;

pub use error::{Error, Result};
