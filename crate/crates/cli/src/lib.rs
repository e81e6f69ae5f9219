//! Batch front end for porosim: configuration, bundled scenarios and the
//! `simulate`, `analyze`, `validate`, `scale-report` and `sweep` commands.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod scenario;
pub mod validate;
