#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Moderate-deviation rate theory for sums of i.i.d. variables on a
//! regularly varying scale.
//!
//! For a scale function `g` with regular-variation index `rho`, the
//! probabilities `P(S_n - n*mu > x * sqrt(n * g(log n)))` decay on the
//! `g(log n)` scale at a rate
//!
//! ```text
//! -(x^2 / (2 sigma^2)  min  lambda / 2^rho)
//! ```
//!
//! where `lambda` is a tail exponent measuring how fast `t^2 P(X > t)`
//! vanishes on the same scale. This crate provides:
//!
//! - [`scale`]: catalog scale functions and the thresholds built from them.
//! - [`tails`]: analytic distributions with exactly known tails, including
//!   families with prescribed (and oscillating) tail exponents.
//! - [`exponents`]: the six tail exponents, computed two independent ways.
//! - [`rate`]: the limiting rate functions and a regime classifier.
//! - [`simulate`]: Monte Carlo estimators (crude, tilted, truncation
//!   sandwich), exponential-inequality envelopes, and exact enumeration
//!   checks of the maximal inequalities used along the way.
//!
//! The crate is `no_std` and needs only `alloc`. Parallel execution is
//! abstracted behind [`simulate::Executor`]; a sequential executor is
//! provided here and thread pools live in the companion CLI crate.

extern crate alloc;

mod error;
mod math;

pub mod exponents;
pub mod rate;
pub mod rng;
pub mod scale;
pub mod simulate;
pub mod tails;

pub use error::{Error, Result};
pub use exponents::TailExponents;
pub use rate::{RateSpec, Regime, Side};
pub use scale::ScaleFunction;
pub use simulate::{Estimate, Method};
pub use tails::TailModel;

/// Normal distribution helpers shared with downstream crates and tests.
pub mod normal {
    pub use crate::math::{normal_ln_sf, normal_quantile, normal_sf};
}
