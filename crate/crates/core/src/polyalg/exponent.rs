use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Exponent vector `α ∈ N^n` of a monomial `x^α`.
///
/// Ordered graded-lexicographically: lower total degree first, and within a
/// degree `x1` before `x2` (so `(1,0) < (0,1)`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent {
    entries: Box<[u32]>,
    degree: u32,
}

impl Exponent {
    pub fn new(entries: impl Into<Box<[u32]>>) -> Self {
        let entries = entries.into();
        let degree = entries.iter().sum();
        Exponent { entries, degree }
    }

    pub fn zero(nvars: usize) -> Self {
        Exponent {
            entries: vec![0; nvars].into_boxed_slice(),
            degree: 0,
        }
    }

    /// `x_var^power`, with `var` zero-based.
    pub fn power(nvars: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        Exponent::new(e)
    }

    pub fn nvars(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0
    }

    /// Componentwise sum, i.e. the exponent of `x^α · x^β`.
    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.nvars(), other.nvars());
        let entries: Box<[u32]> = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a + b)
            .collect();
        Exponent {
            entries,
            degree: self.degree + other.degree,
        }
    }

    /// Componentwise difference if `other ≤ self` entrywise.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        let mut out = Vec::with_capacity(self.nvars());
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Exponent::new(out))
    }

    /// Evaluates `p^α`.
    pub fn eval<T: num_traits::Float>(&self, point: &[T]) -> T {
        self.entries
            .iter()
            .zip(point)
            .fold(T::one(), |acc, (&a, &p)| acc * p.powi(a as i32))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.entries.cmp(&self.entries))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Largest basis the crate will materialize.
pub const MAX_BASIS_LEN: u128 = 5_000_000;

/// `s(d) = C(n+d, n)`, the number of monomials of degree at most `d` in `n`
/// variables. `None` on overflow.
pub fn basis_len(nvars: usize, degree: u32) -> Option<u128> {
    let n = nvars as u128;
    let d = degree as u128;
    let k = n.min(d);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(n + d + 1 - i)? / i;
    }
    Some(acc)
}

/// All exponents with `|α| ≤ degree` in graded-lexicographic order.
pub fn monomial_basis(nvars: usize, degree: u32) -> Result<Vec<Exponent>> {
    if nvars == 0 {
        return Err(Error::Invalid("monomial basis needs at least one variable".into()));
    }
    let len = basis_len(nvars, degree).filter(|&l| l <= MAX_BASIS_LEN).ok_or_else(|| {
        Error::Capacity(format!("basis of N^{nvars}_{degree} exceeds {MAX_BASIS_LEN} monomials"))
    })?;
    let mut out = Vec::with_capacity(len as usize);
    let mut scratch = vec![0u32; nvars];
    for t in 0..=degree {
        fill_degree(&mut scratch, 0, t, &mut out);
    }
    debug_assert_eq!(out.len() as u128, len);
    Ok(out)
}

fn fill_degree(scratch: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Exponent>) {
    if pos + 1 == scratch.len() {
        scratch[pos] = remaining;
        out.push(Exponent::new(scratch.to_vec()));
        return;
    }
    for a in (0..=remaining).rev() {
        scratch[pos] = a;
        fill_degree(scratch, pos + 1, remaining - a, out);
    }
    scratch[pos] = 0;
}

/// Position lookup for `N^n_d`.
#[derive(Clone, Debug)]
pub struct MonomialIndex {
    nvars: usize,
    degree: u32,
    basis: Vec<Exponent>,
    positions: HashMap<Exponent, usize>,
}

impl MonomialIndex {
    pub fn new(nvars: usize, degree: u32) -> Result<Self> {
        let basis = monomial_basis(nvars, degree)?;
        let positions = basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        Ok(MonomialIndex {
            nvars,
            degree,
            basis,
            positions,
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Exponent] {
        &self.basis
    }

    pub fn position(&self, e: &Exponent) -> Option<usize> {
        self.positions.get(e).copied()
    }

    /// Vector of monomials `v_d(p)`.
    pub fn eval_monomials<T: num_traits::Float>(&self, point: &[T]) -> Vec<T> {
        self.basis.iter().map(|e| e.eval(point)).collect()
    }
}
