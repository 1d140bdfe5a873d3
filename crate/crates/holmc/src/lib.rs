//! Text formats, command line and benchmarks on top of `holmc-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod config;
pub mod format;
