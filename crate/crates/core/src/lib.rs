// NaN-rejecting comparisons are written as negations on purpose; oracle
// constants keep their full reference digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod cli;
pub mod densities;
pub mod error;
pub mod estimate;
pub mod gaussian;
pub mod laplace;
pub mod mellin;
pub mod processes;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;
pub mod step;

pub use error::{Error, Result};
