// `!(x > 0.0)` is used on purpose so NaN fails validation; long constants are tabulated digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod acceptance;
pub mod attention;
pub mod demo;
pub mod densities;
pub mod discrete;
pub mod error;
pub mod math;
pub mod oracle;
pub mod value_fn;

pub use error::{Error, Result};
