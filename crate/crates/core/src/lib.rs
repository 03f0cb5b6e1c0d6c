//! Exact symbolic checks for Lie algebroids and infinitesimally
//! multiplicative tensors over a polynomial coordinate chart.

pub mod kernel;
pub mod geometry;
pub mod report;
pub mod algebroid;
pub mod im;
pub mod prolongation;
pub mod vvforms;
pub mod cli;
