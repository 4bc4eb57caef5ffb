use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polyalg::{Exponent, MonomialIndex, Poly, WeightSequence};
use crate::real::Real;

/// Truncated moment sequence `y = (y_α)`, `α ∈ N^n_{2d}`, with a value for
/// every exponent up to `max_degree`.
#[derive(Clone, Debug)]
pub struct MomentSequence<T: Real> {
    index: Arc<MonomialIndex>,
    values: Vec<T>,
    from_measure: bool,
}

impl<T: Real> PartialEq for MomentSequence<T> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars()
            && self.max_degree() == other.max_degree()
            && self.values == other.values
    }
}

pub(crate) fn out_of_range(e: &Exponent, max_degree: u32) -> Error {
    Error::DegreeOutOfRange {
        exponent: e.to_string(),
        max_degree,
    }
}

impl<T: Real> MomentSequence<T> {
    /// Values listed in the order of `monomial_basis(nvars, max_degree)`.
    pub fn from_values(nvars: usize, max_degree: u32, values: Vec<T>) -> Result<Self> {
        let index = Arc::new(MonomialIndex::new(nvars, max_degree)?);
        if values.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: values.len(),
            });
        }
        Ok(MomentSequence {
            index,
            values,
            from_measure: false,
        })
    }

    pub fn zeros(nvars: usize, max_degree: u32) -> Result<Self> {
        Self::from_fn(nvars, max_degree, |_| T::zero())
    }

    pub fn from_fn(nvars: usize, max_degree: u32, mut f: impl FnMut(&Exponent) -> T) -> Result<Self> {
        let index = Arc::new(MonomialIndex::new(nvars, max_degree)?);
        let values = index.basis().iter().map(&mut f).collect();
        Ok(MomentSequence {
            index,
            values,
            from_measure: false,
        })
    }

    /// Moments of `Σ_i w_i δ_{p_i}`. Flagged as measure-derived when all
    /// weights are nonnegative.
    pub fn from_atoms(nvars: usize, max_degree: u32, atoms: &[(T, Vec<T>)]) -> Result<Self> {
        for (_, p) in atoms {
            if p.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: p.len(),
                });
            }
        }
        let mut y = Self::from_fn(nvars, max_degree, |e| {
            atoms.iter().fold(T::zero(), |acc, (w, p)| acc + *w * e.eval(p))
        })?;
        y.from_measure = atoms.iter().all(|(w, _)| *w >= T::zero());
        Ok(y)
    }

    /// Marks the sequence as coming from a (nonnegative) measure.
    pub fn with_measure_claim(mut self, claim: bool) -> Self {
        self.from_measure = claim;
        self
    }

    pub fn claims_measure(&self) -> bool {
        self.from_measure
    }

    /// A measure-derived sequence must have `y_0 ≥ 0`; reports the violation
    /// instead of clamping.
    pub fn check_measure_claim(&self) -> Result<()> {
        if self.from_measure && self.values[0] < T::zero() {
            return Err(Error::Invalid(format!(
                "sequence flagged as measure moments has y_0 = {} < 0",
                self.values[0]
            )));
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        self.index.nvars()
    }

    pub fn max_degree(&self) -> u32 {
        self.index.degree()
    }

    pub fn index(&self) -> &MonomialIndex {
        &self.index
    }

    /// Values in basis order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponent, T)> + '_ {
        self.index.basis().iter().zip(self.values.iter().copied())
    }

    pub fn get(&self, e: &Exponent) -> Result<T> {
        self.index
            .position(e)
            .map(|i| self.values[i])
            .ok_or_else(|| out_of_range(e, self.max_degree()))
    }

    pub fn set(&mut self, e: &Exponent, v: T) -> Result<()> {
        let i = self
            .index
            .position(e)
            .ok_or_else(|| out_of_range(e, self.max_degree()))?;
        self.values[i] = v;
        Ok(())
    }

    pub fn scale(&self, s: T) -> Self {
        MomentSequence {
            index: self.index.clone(),
            values: self.values.iter().map(|&v| v * s).collect(),
            from_measure: self.from_measure && s >= T::zero(),
        }
    }

    /// Keeps only moments up to `degree`.
    pub fn truncate(&self, degree: u32) -> Result<Self> {
        if degree > self.max_degree() {
            return Err(Error::Invalid(format!(
                "cannot truncate degree {} sequence to degree {degree}",
                self.max_degree()
            )));
        }
        let mut y = Self::from_fn(self.nvars(), degree, |e| {
            self.values[self.index.position(e).unwrap()]
        })?;
        y.from_measure = self.from_measure;
        Ok(y)
    }

    /// The shifted sequence `z_α = L_y(g·x^α)`, defined up to
    /// `max_degree − deg g`.
    pub fn shifted(&self, g: &Poly<T>) -> Result<Self> {
        self.check_dim(g)?;
        let dg = g.degree();
        if dg > self.max_degree() {
            return Err(Error::DegreeOutOfRange {
                exponent: format!("deg g = {dg}"),
                max_degree: self.max_degree(),
            });
        }
        let mut err = None;
        let z = Self::from_fn(self.nvars(), self.max_degree() - dg, |a| {
            let mut acc = T::zero();
            for (d, &c) in g.terms() {
                match self.get(&a.add(d)) {
                    Ok(v) => acc += c * v,
                    Err(e) => err = Some(e),
                }
            }
            acc
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(z),
        }
    }

    pub(crate) fn check_dim(&self, f: &Poly<T>) -> Result<()> {
        if f.nvars() != self.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.nvars(),
                found: f.nvars(),
            });
        }
        Ok(())
    }
}

/// Riesz functional `L_y(f) = Σ_α f_α y_α`.
pub fn riesz<T: Real>(y: &MomentSequence<T>, f: &Poly<T>) -> Result<T> {
    y.check_dim(f)?;
    let mut acc = T::zero();
    for (e, &c) in f.terms() {
        acc += c * y.get(e)?;
    }
    Ok(acc)
}

/// Finite truncation `max_α |y_α| / w_α` of the dual norm of `L_y`.
/// Weights past the floating point range contribute zero.
pub fn dual_norm<T: Real>(y: &MomentSequence<T>, w: &WeightSequence) -> T {
    y.iter().fold(T::zero(), |acc, (e, v)| match w.weight::<T>(e) {
        Ok(wa) => num_traits::Float::max(acc, num_traits::Float::abs(v) / wa),
        Err(_) => acc,
    })
}
