// NaN-rejecting `!(x > 0.0)` guards are intentional; reference constants keep
// all the digits they were computed with.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod closedform;
pub mod dd;
pub mod density;
pub mod error;
pub mod mc;
pub mod rng;
pub mod series;
pub mod specfun;

pub use error::{Error, Result};
