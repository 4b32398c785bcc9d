#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod numerics;
pub mod skeleton;
pub mod tree;
pub mod words;

pub use error::{ErdError, Result};
pub use num_complex::Complex64;
