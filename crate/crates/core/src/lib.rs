// `!(a < b)` comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod collision;
pub mod config;
pub mod error;
pub mod figure;
pub mod kernel;
pub mod observations;
pub mod output;
pub mod par;
pub mod quadrature;
pub mod resonance;
pub mod spectral;
pub mod zero_curve;

pub use error::{Error, Result};
