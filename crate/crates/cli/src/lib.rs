//! Batch experiments on truncated Dicke spectra: configuration, runners and
//! output files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
