//! Numerical laboratory for random sums of products of sparse polynomials.
//!
//! The crate samples circuits `F = sum_i f_i1 ... f_ik_i x^(d_i)` with
//! independent random coefficients, counts their real zeros exactly, and
//! evaluates the explicit expected-zero bounds (the `A B (sum k_i)(t - 1)`
//! bound for shift-free circuits, the Rice integral of the weight-function
//! integrand, and its closed-form `O(m k^2 t)` majorant) against Monte Carlo
//! estimates.

pub mod bounds;
pub mod config;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod func;
pub mod polynomials;
pub mod quadrature;
pub mod realroots;

pub use error::{Error, Result};
