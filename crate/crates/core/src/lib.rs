//! Moments of limit log-infinitely-divisible multiplicative chaos.
//!
//! Four independent routes to the same numbers: gamma-product closed forms,
//! singular simplex quadrature, exact binomial sums at integer exponents,
//! and Monte Carlo simulation of the cone construction.

// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binomsum;
pub mod closedform;
pub mod error;
pub mod levy;
pub mod quadrature;
pub mod simulator;

pub use error::{Error, Result};
pub use levy::{Atom, Finiteness, LevySpectrum, MomentFiniteness};
pub use num_rational::BigRational;
