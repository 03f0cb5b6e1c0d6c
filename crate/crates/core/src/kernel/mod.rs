//! Exact multivariate arithmetic: symbols, polynomials, rational functions
//! and the expression grammar.

pub mod gauss;
pub mod parse;
pub mod poly;
pub mod ratfn;
pub mod symbol;

use thiserror::Error;

pub use gauss::Gauss;
pub use parse::{eval_expr, parse_expr, parse_expr_free, ratfn, rf, Expr};
pub use poly::{q, qr, Monomial, Poly, Q};
pub use ratfn::RatFn;
pub use symbol::{vars, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown variable `{name}`")]
    UnknownVariable { name: String, line: usize, col: usize },
    #[error("division by zero")]
    DivisionByZero,
}
