//! Vector-valued forms and the structure built on IM `(p,1)`-tensors:
//! Frölicher–Nijenhuis calculus, brackets of IM vector-valued forms, IM
//! `(1,1)`-tensors with their torsion, Poisson quasi-Nijenhuis pairs,
//! holomorphic data, projections and matched pairs.

pub mod bialg;
pub mod fn_calculus;
pub mod holo;
pub mod im11;
pub mod pqn;
pub mod projection;
pub mod imvv;
pub mod matched;

use thiserror::Error;

use crate::im::ImError;

pub use bialg::{deltak_theta, BialgebroidData, DeltaKOutcome};
pub use fn_calculus::{fn_bracket, fn_bracket_explicit, lie_derivative, nijenhuis_torsion, torsion_on, VvForm};
pub use pqn::{dr_direct, dr_operator, lemma_identities, pqn_check, PqnMode};
pub use holo::{holomorphic_check, DolbeaultTable, HolomorphicOutcome};
pub use im11::{im11_check, im11_power, nijenhuis_components, structure_conditions, Structure, IM11};
pub use matched::{flat_splitting_check, matched_pair_check, morphism_check, MatchedPairData, Rep, Side};
pub use projection::{projection_analysis, projection_from_product, ProjectionAnalysis};
pub use imvv::{extend_d, extend_d_pair, extend_l, imvv_bracket, r_as_vvform};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VvError {
    #[error("expected a vector-valued form (q = 1 on the tangent bundle), got degrees {0:?} on rank {1}")]
    NotVectorValued((usize, usize), usize),
    #[error("expected degree {expected}, got {got}")]
    Degree { expected: usize, got: usize },
    #[error("operands live on different charts")]
    ChartMismatch,
    #[error("operands live on different algebroids")]
    AlgebroidMismatch,
    #[error("bivector is not Poisson: [Π,Π] = {0}")]
    NotPoisson(String),
    #[error("3-form is not closed: dφ = {0}")]
    NotClosed(String),
    #[error("δ² ≠ 0 at {probe}: {value}")]
    DeltaSquare { probe: String, value: String },
    #[error("the two computations of D² disagree at {probe}: difference {diff}")]
    RouteMismatch { probe: String, diff: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Im(#[from] ImError),
}

/// `(−1)^e` for any integer exponent.
pub(crate) fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}
