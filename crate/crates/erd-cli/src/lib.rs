//! Command-line front end: configuration, reports and SVG portraits.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod render;
pub mod report;
pub mod run;
