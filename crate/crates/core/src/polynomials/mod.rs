//! Sparse polynomials, sum-of-products circuits, their generating functions
//! and weight functions.

mod circuit;
mod dense;
mod sparse;
mod weights;

pub use circuit::{Circuit, CircuitInstance, ProductTerm, Reciprocal, DEFAULT_DEGREE_CAP};
pub use dense::DensePoly;
pub(crate) use dense::count_sign_changes;
pub use sparse::{
    alpha, alpha_logderiv, alpha_prime, beta, beta_prime, eval_sparse, normalize_support, SparsePoly,
    Support, MAX_EXPONENT,
};
pub use weights::TermWeights;
