use std::collections::BTreeMap;


use super::exponent::Exponent;
use crate::error::{Error, Result};
use crate::real::{Coefficient, FromRational, Real};

/// Sparse multivariate polynomial over `n` variables.
///
/// Terms are kept in graded-lexicographic order; no stored coefficient is
/// exactly zero.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(Exponent::zero(nvars), c)
    }

    pub fn monomial(exponent: Exponent, c: C) -> Self {
        let mut p = Self::zero(exponent.nvars());
        if !c.is_zero() {
            p.terms.insert(exponent, c);
        }
        p
    }

    /// The variable `x_{var+1}`.
    pub fn variable(nvars: usize, var: usize) -> Self {
        Self::monomial(Exponent::power(nvars, var, 1), C::one())
    }

    /// Builds a polynomial from possibly repeated terms; repeated exponents are
    /// summed and exact zeros dropped.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: e.nvars(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, e: Exponent, c: C) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Maximum total degree of a stored term (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Exponent::total_degree)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &C)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let v = c.clone() * s.clone();
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Coefficientwise conversion; terms mapping to zero are dropped.
    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        out
    }
}

impl<T: Real> Poly<T> {
    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars, "evaluation point has wrong dimension");
        self.terms
            .iter()
            .fold(T::zero(), |acc, (e, &c)| acc + c * e.eval(point))
    }

    /// Plain coefficient ℓ1 norm.
    pub fn l1_norm(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, &c| acc + num_traits::Float::abs(c))
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, &c| num_traits::Float::max(acc, num_traits::Float::abs(c)))
    }
}

impl Poly<num_rational::BigRational> {
    /// Lowers exact coefficients to a floating point type.
    pub fn to_real<T: Real + FromRational>(&self) -> Result<Poly<T>> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let v = T::from_rational(c).ok_or_else(|| {
                Error::Invalid(format!("coefficient {c} does not fit the floating point range"))
            })?;
            if !v.is_zero() {
                out.terms.insert(e.clone(), v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(n: usize, i: usize) -> Poly<f64> {
        Poly::variable(n, i)
    }

    #[test]
    fn products_and_cancellation() {
        let x1 = x(1, 0);
        let sq = x1.mul(&x1).unwrap();
        assert_eq!(sq, Poly::monomial(Exponent::new(vec![2]), 1.0));

        let one = Poly::constant(1, 1.0);
        let a = one.add(&x1).unwrap();
        let b = one.sub(&x1).unwrap();
        let prod = a.mul(&b).unwrap();
        let expected = Poly::from_terms(1, [(Exponent::new(vec![0]), 1.0), (Exponent::new(vec![2]), -1.0)]).unwrap();
        assert_eq!(prod, expected);

        let f = a.mul(&a).unwrap();
        assert!(f.add(&f.scale(&-1.0)).unwrap().is_zero());
    }

    #[test]
    fn degree_and_dims() {
        let f = x(2, 0).mul(&x(2, 1)).unwrap().pow(2).unwrap();
        assert_eq!(f.degree(), 4);
        assert_eq!(Poly::<f64>::zero(3).degree(), 0);
        let err = x(2, 0).add(&x(3, 0)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn eval_matches_hand_value() {
        // (1 + x1 x2)^2 at (2, -1) = 1
        let f = Poly::constant(2, 1.0).add(&x(2, 0).mul(&x(2, 1)).unwrap()).unwrap().pow(2).unwrap();
        assert_eq!(f.eval(&[2.0, -1.0]), 1.0);
        assert_eq!(f.eval(&[1.0, -1.0]), 0.0);
        assert_eq!(f.eval(&[1.0, 1.0]), 4.0);
    }
}
