//! Pair-excitation dynamics of a dilute Bose gas at zero temperature.
//!
//! Units throughout: ħ = 2m = 1, coupling `g = 16πaρ₀`. Scaled coordinates are
//! `r̃ = √g·r` and `τ = g·t`.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod homogeneous;
pub mod ode;
pub mod poles;
pub mod quad;
pub mod specfun;
pub mod trap;
pub mod validation;

mod dd;

pub use error::{Error, Result};
pub use num_complex::Complex64;
