//! Tensor calculus on one polynomial chart.

pub mod chart;
pub mod cwl;
pub mod field;
pub mod index;
pub mod tensor;

use thiserror::Error;

pub use chart::{vecops, Chart, Matrix};
pub use field::CoordField;
pub use cwl::{from_cwl, skew_project, to_cwl, CwlFunction, SlotVars};
pub use index::Mask;
pub use tensor::MixedTensor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("tensors live on different charts")]
    ChartMismatch,
    #[error("bundle ranks differ ({left} vs {right})")]
    RankMismatch { left: usize, right: usize },
    #[error("nothing to contract on the {side} side (degree 0)")]
    NothingToContract { side: &'static str },
    #[error("expected a pure form, got multivector degree {q}")]
    NotAForm { q: usize },
    #[error("function is not componentwise linear (witness {witness})")]
    NotLinear { witness: String },
    #[error("function is not skew in its slots (witness {witness})")]
    NotSkew { witness: String },
}
