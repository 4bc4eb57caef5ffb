//! Sparse multivariate polynomials, monomial bases and coefficient norms.

mod exponent;
mod poly;
mod text;
mod weights;

pub use exponent::{basis_len, monomial_basis, Exponent, MonomialIndex, MAX_BASIS_LEN};
pub use poly::Poly;
pub use text::{format_polynomial, max_variable_index, parse_exact, parse_polynomial};
pub use weights::{factorial, weighted_norm, NormKind, WeightSequence, MAX_FACTORIAL};
