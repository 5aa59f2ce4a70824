// `!(x > 0.0)` is the NaN-rejecting form used for every parameter guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrete;
pub mod error;
pub mod harness;
pub mod identify;
pub mod sample;
pub mod stability;
pub mod transform;

pub use error::{Error, Result};
