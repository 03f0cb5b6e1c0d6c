//! Lie algebroids on a trivialized bundle: bracket, anchor, Schouten
//! calculus, the `Γ(A)`-action and the coordinate lifts.

pub mod calculus;
pub mod lifts;
pub mod structure;

use thiserror::Error;

pub use structure::{bivector_entry, sharp, Algebroid, Section};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebroidError {
    #[error("anchor is {rows}x{cols}, expected {n}x{m}")]
    AnchorShape { rows: usize, cols: usize, n: usize, m: usize },
    #[error("section has {got} coefficients, bundle rank is {rank}")]
    SectionLength { got: usize, rank: usize },
    #[error("expected a bivector on the tangent bundle")]
    NotABivector,
}
