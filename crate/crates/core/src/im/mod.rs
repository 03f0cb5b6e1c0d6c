//! Infinitesimally multiplicative (IM) tensors `(D, l, r)` on a Lie
//! algebroid, their checker, and the classical reformulations.

pub mod check;
pub mod imform;
pub mod prelie;
pub mod qdiff;
pub mod tensor;

use thiserror::Error;

pub use check::{im_check, im_check_with, im_redundancy, ImEq, Outcome, Probes, Redundancy};
pub use imform::IMForm;
pub use prelie::prelie_from_im20;
pub use qdiff::QDifferential;
pub use tensor::{coboundary, IMTensor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImError {
    #[error("{what}: expected degrees {expected:?}, got {got:?}")]
    Shape { what: String, expected: (usize, usize), got: (usize, usize) },
    #[error("{what}: expected {expected} entries, got {got}")]
    Count { what: String, expected: usize, got: usize },
    #[error("{0} is defined on a different chart or bundle")]
    Mismatch(String),
    #[error("{0}")]
    Degrees(String),
}
