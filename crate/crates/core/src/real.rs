//! Scalar abstractions.
//!
//! Polynomial arithmetic only needs a commutative ring ([`Coefficient`]); the
//! parser works over exact rationals and converts at the end. Everything that
//! evaluates norms, eigenvalues or square roots needs a [`Real`], which is
//! implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Ring operations required of a polynomial coefficient.
pub trait Coefficient:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<C> Coefficient for C where
    C: Clone
        + PartialEq
        + Debug
        + Zero
        + One
        + Neg<Output = C>
        + Add<Output = C>
        + Sub<Output = C>
        + Mul<Output = C>
{
}

/// Floating point scalar: f32 or f64.
pub trait Real:
    Coefficient
    + Copy
    + num_traits::Float
    + FromPrimitive
    + ToPrimitive
    + nalgebra::RealField
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from f64; `None` if the value does not fit.
    fn from_f64_checked(v: f64) -> Option<Self> {
        let x = <Self as FromPrimitive>::from_f64(v)?;
        if num_traits::Float::is_finite(x) || !v.is_finite() {
            Some(x)
        } else {
            None
        }
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Coefficients that can be printed in the polynomial text format.
pub trait TextCoefficient: Coefficient + Display {
    fn is_negative_value(&self) -> bool;
    fn abs_value(&self) -> Self;
    fn is_one_value(&self) -> bool {
        self.is_one()
    }
}

impl TextCoefficient for f64 {
    fn is_negative_value(&self) -> bool {
        *self < 0.0
    }
    fn abs_value(&self) -> Self {
        f64::abs(*self)
    }
}

impl TextCoefficient for f32 {
    fn is_negative_value(&self) -> bool {
        *self < 0.0
    }
    fn abs_value(&self) -> Self {
        f32::abs(*self)
    }
}

impl TextCoefficient for BigRational {
    fn is_negative_value(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_value(&self) -> Self {
        Signed::abs(self)
    }
}

/// Conversion from exact rationals, used when a parsed polynomial is lowered
/// to floating point.
pub trait FromRational: Sized {
    fn from_rational(q: &BigRational) -> Option<Self>;
}

impl FromRational for f64 {
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.to_f64().filter(|v| v.is_finite())
    }
}

impl FromRational for f32 {
    fn from_rational(q: &BigRational) -> Option<Self> {
        q.to_f64().map(|v| v as f32).filter(|v| v.is_finite())
    }
}

impl FromRational for BigRational {
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
}

