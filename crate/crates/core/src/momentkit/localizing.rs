use std::collections::BTreeMap;

use super::matrix::{SparseSym, SymMatrix};
use super::sequence::{out_of_range, MomentSequence};
use crate::error::{Error, Result};
use crate::polyalg::{Exponent, MonomialIndex, Poly};
use crate::real::Real;

/// The matrices `B^J_α` with `g_J(x)·v_d(x)v_d(x)^T = Σ_α B^J_α x^α`.
#[derive(Clone, Debug)]
pub struct BasisMatrixSet<T: Real> {
    generator: Poly<T>,
    order: u32,
    rows: MonomialIndex,
    matrices: BTreeMap<Exponent, SparseSym<T>>,
}

impl<T: Real> BasisMatrixSet<T> {
    pub fn generator(&self) -> &Poly<T> {
        &self.generator
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Side `s(d)` of every matrix.
    pub fn side(&self) -> usize {
        self.rows.len()
    }

    /// Row/column labels `N^n_d`.
    pub fn rows(&self) -> &MonomialIndex {
        &self.rows
    }

    /// Largest `|α|` with a nonzero `B^J_α`, i.e. `2d + deg g_J`.
    pub fn support_degree(&self) -> u32 {
        2 * self.order + self.generator.degree()
    }

    pub fn matrix(&self, alpha: &Exponent) -> Option<&SparseSym<T>> {
        self.matrices.get(alpha)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponent, &SparseSym<T>)> + '_ {
        self.matrices.iter()
    }

    /// `Σ_α c(α) B^J_α` for arbitrary coefficients.
    pub fn combine(&self, mut coeff: impl FnMut(&Exponent) -> Result<T>) -> Result<SymMatrix<T>> {
        let mut acc = SymMatrix::zeros(self.side());
        for (a, b) in &self.matrices {
            b.accumulate_into(&mut acc, coeff(a)?);
        }
        Ok(acc)
    }

    /// `Σ_α B^J_α p^α`.
    pub fn evaluate(&self, point: &[T]) -> SymMatrix<T> {
        self.combine(|a| Ok(a.eval(point))).expect("evaluation cannot fail")
    }
}

/// Builds `B^J_α` with `(B^J_α)_{β,γ} = Σ_{δ: δ+β+γ=α} g_δ` over `β, γ ∈ N^n_d`.
pub fn build_basis_matrices<T: Real>(g: &Poly<T>, order: u32) -> Result<BasisMatrixSet<T>> {
    let rows = MonomialIndex::new(g.nvars(), order)?;
    let side = rows.len();
    let mut matrices: BTreeMap<Exponent, SparseSym<T>> = BTreeMap::new();
    let basis = rows.basis();
    for i in 0..side {
        for j in i..side {
            let bg = basis[i].add(&basis[j]);
            for (d, &c) in g.terms() {
                matrices
                    .entry(bg.add(d))
                    .or_insert_with(|| SparseSym::new(side))
                    .push(i, j, c);
            }
        }
    }
    Ok(BasisMatrixSet {
        generator: g.clone(),
        order,
        rows,
        matrices,
    })
}

/// `M_d(y)` with entries `y_{β+γ}`.
pub fn moment_matrix<T: Real>(y: &MomentSequence<T>, order: u32) -> Result<SymMatrix<T>> {
    if 2 * order > y.max_degree() {
        return Err(out_of_range(
            &Exponent::power(y.nvars(), 0, 2 * order),
            y.max_degree(),
        ));
    }
    let rows = MonomialIndex::new(y.nvars(), order)?;
    let basis = rows.basis();
    let mut err = None;
    let m = SymMatrix::from_upper(rows.len(), |i, j| {
        y.get(&basis[i].add(&basis[j])).unwrap_or_else(|e| {
            err = Some(e);
            T::zero()
        })
    });
    err.map_or(Ok(m), Err)
}

/// `M_d(g y)` with entries `Σ_δ g_δ y_{β+γ+δ}`, computed entrywise.
pub fn localizing_matrix<T: Real>(
    y: &MomentSequence<T>,
    g: &Poly<T>,
    order: u32,
) -> Result<SymMatrix<T>> {
    y.check_dim(g)?;
    let need = 2 * order + g.degree();
    if need > y.max_degree() {
        return Err(Error::DegreeOutOfRange {
            exponent: format!("2*{order} + deg g = {need}"),
            max_degree: y.max_degree(),
        });
    }
    let rows = MonomialIndex::new(y.nvars(), order)?;
    let basis = rows.basis();
    let mut err = None;
    let m = SymMatrix::from_upper(rows.len(), |i, j| {
        let bg = basis[i].add(&basis[j]);
        let mut acc = T::zero();
        for (d, &c) in g.terms() {
            match y.get(&bg.add(d)) {
                Ok(v) => acc += c * v,
                Err(e) => err = Some(e),
            }
        }
        acc
    });
    err.map_or(Ok(m), Err)
}
