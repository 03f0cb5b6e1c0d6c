//! The prolonged algebroid `𝔸 = (⊕ᵖTA) ⊕ (⊕ᵠT*A)` over the big base,
//! presented by generators; the cocycle built from an IM triple; and linear
//! tensors on vector bundles.

pub mod cocycle;
pub mod generators;
pub mod linear;

use thiserror::Error;

pub use cocycle::{build_mu, cocycle_check, cocycle_check_with, CocycleReport, Family, MuSection};
pub use generators::{BigBase, Gen, GenSection};
pub use linear::{extract_components, reconstruct_linear, LinearBase, LinearTensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProlongationError {
    #[error("triple has degrees (q,p) = {got:?} but the big base is built for {expected:?}")]
    Degrees { expected: (usize, usize), got: (usize, usize) },
    #[error("triple lives on a different algebroid")]
    Mismatch,
    #[error("value is not a linear tensor: {0}")]
    NotLinear(String),
}
