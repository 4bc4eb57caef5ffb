use std::sync::OnceLock;

use super::exponent::Exponent;
use super::poly::Poly;
use crate::error::{Error, Result};
use crate::real::Real;

/// Which coefficient norm to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormKind {
    /// `w_α = 1`.
    L1,
    /// `w_α = (2⌈|α|/2⌉)!`.
    LW,
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "lw" => Ok(NormKind::LW),
            other => Err(Error::Invalid(format!("unknown norm `{other}` (expected l1 or lw)"))),
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NormKind::L1 => "l1",
            NormKind::LW => "lw",
        })
    }
}

/// Largest `k` with `k!` finite in f64.
pub const MAX_FACTORIAL: u32 = 170;

fn factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_FACTORIAL as usize + 1);
        let mut acc = 1.0f64;
        t.push(acc);
        for k in 1..=MAX_FACTORIAL {
            acc *= k as f64;
            t.push(acc);
        }
        t
    })
}

/// `k!` in double precision, `None` past 170.
pub fn factorial(k: u32) -> Option<f64> {
    factorial_table().get(k as usize).copied()
}

/// The weight sequence `w = (w_α)` of an ℓ1-type norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeightSequence {
    kind: NormKind,
}

impl WeightSequence {
    pub fn new(kind: NormKind) -> Self {
        WeightSequence { kind }
    }

    pub fn l1() -> Self {
        Self::new(NormKind::L1)
    }

    pub fn lw() -> Self {
        Self::new(NormKind::LW)
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    /// Weight for monomials of total degree `degree`.
    pub fn weight_for_degree<T: Real>(&self, degree: u32) -> Result<T> {
        match self.kind {
            NormKind::L1 => Ok(T::one()),
            NormKind::LW => {
                let even = 2 * degree.div_ceil(2);
                factorial(even)
                    .and_then(T::from_f64_checked)
                    .ok_or(Error::WeightOverflow { degree })
            }
        }
    }

    pub fn weight<T: Real>(&self, alpha: &Exponent) -> Result<T> {
        self.weight_for_degree(alpha.total_degree())
    }
}

/// `‖f‖_w = Σ_α w_α |f_α|`.
pub fn weighted_norm<T: Real>(f: &Poly<T>, w: &WeightSequence) -> Result<T> {
    let mut acc = T::zero();
    for (e, &c) in f.terms() {
        acc += w.weight::<T>(e)? * num_traits::Float::abs(c);
    }
    Ok(acc)
}
