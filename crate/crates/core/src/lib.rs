pub mod certify;
pub mod conemodel;
pub mod error;
pub mod momentkit;
pub mod polyalg;
pub mod projector;
pub mod real;
pub mod sdpcore;

pub use error::{Error, Result};
pub use real::{Coefficient, Real};

/// Double precision polynomial, the working type of the solver layers.
pub type Polynomial = polyalg::Poly<f64>;
/// Single precision polynomial.
pub type Polynomial32 = polyalg::Poly<f32>;
/// Exact polynomial as produced by the parser.
pub type RationalPolynomial = polyalg::Poly<num_rational::BigRational>;
