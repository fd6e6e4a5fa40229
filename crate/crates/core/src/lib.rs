// Negated comparisons such as `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod mmse;
pub mod quadrature;
pub mod sim;
pub mod special;

pub use error::{Error, Result};
