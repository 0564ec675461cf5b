//! Significant-digit distributions of random variables through the mod-1 map.
//!
//! If `X = log₁₀ Y` has density `g`, the leading digits of `Y` depend only on
//! `g†(x) = Σₖ g(x + k)` on `[0, 1)`: the probability that `Y` starts with the
//! block `d₁…dₙ` is the mass `g†` puts on `[log(v/10^{n−1}), log((v+1)/10^{n−1}))`
//! where `v` is the block's integer value. Benford's law is `g† ≡ 1`.
//!
//! The crate provides
//! - [`density`]: piecewise-analytic densities, exact integration, mod-1
//!   projection, wrap-around translation and change of logarithm base;
//! - [`digits`]: Benford block probabilities and digit extraction;
//! - [`construct`]: densities that are Benford in exactly their first `n` digits;
//! - [`sample`]: deterministic seeded sampling of `X` and `Y = 10^X`;
//! - [`analyze`]: empirical distributions, chi-square fits, and scale/base
//!   invariance experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod analyze;
pub mod construct;
pub mod density;
pub mod digits;
mod error;
pub mod presets;
pub mod sample;

pub use error::{Error, Result};
