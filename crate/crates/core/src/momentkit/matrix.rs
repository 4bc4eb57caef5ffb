use nalgebra::DMatrix;

use crate::real::Real;

/// Relative tolerance of the PSD test.
pub const PSD_TOL: f64 = 1e-8;

/// Dense symmetric matrix; symmetry is exact because every constructor writes
/// both triangles from the same value.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix<T: Real> {
    data: DMatrix<T>,
}

/// Extreme eigenvalues and the PSD verdict of a symmetric matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub min: T,
    pub max: T,
}

impl<T: Real> Spectrum<T> {
    /// `λ_min ≥ −tol·max(1, λ_max)`.
    pub fn is_psd_with(&self, tol: T) -> bool {
        self.min >= -tol * num_traits::Float::max(T::one(), self.max)
    }

    pub fn is_psd(&self) -> bool {
        self.is_psd_with(T::from_f64_checked(PSD_TOL).unwrap_or_else(T::default_epsilon))
    }
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(side: usize) -> Self {
        SymMatrix {
            data: DMatrix::zeros(side, side),
        }
    }

    pub fn identity(side: usize) -> Self {
        SymMatrix {
            data: DMatrix::identity(side, side),
        }
    }

    /// Fills from the upper triangle `f(i, j)`, `i ≤ j`.
    pub fn from_upper(side: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = DMatrix::zeros(side, side);
        for i in 0..side {
            for j in i..side {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        SymMatrix { data }
    }

    /// Symmetrizes `(A + A^T)/2`.
    pub fn from_matrix(m: &DMatrix<T>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "matrix must be square");
        let half = T::from_f64_checked(0.5).unwrap();
        Self::from_upper(m.nrows(), |i, j| (m[(i, j)] + m[(j, i)]) * half)
    }

    /// Outer product `v v^T`.
    pub fn outer(v: &[T]) -> Self {
        Self::from_upper(v.len(), |i, j| v[i] * v[j])
    }

    pub fn side(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.data
    }

    /// Adds `s` at `(i, j)` and `(j, i)` (once on the diagonal).
    pub fn add_sym(&mut self, i: usize, j: usize, s: T) {
        self.data[(i, j)] += s;
        if i != j {
            self.data[(j, i)] += s;
        }
    }

    pub fn scale(&self, s: T) -> Self {
        SymMatrix { data: &self.data * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        SymMatrix {
            data: &self.data + &other.data,
        }
    }

    /// Trace inner product `⟨A, B⟩`.
    pub fn inner(&self, other: &Self) -> T {
        self.data.dot(&other.data)
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| num_traits::Float::max(acc, num_traits::Float::abs(v)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.side(), other.side());
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (&a, &b)| num_traits::Float::max(acc, num_traits::Float::abs(a - b)))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        if self.side() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<T> = self.data.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Extreme eigenvalues; the empty matrix reports `(0, 0)`.
    pub fn spectrum(&self) -> Spectrum<T> {
        let ev = self.eigenvalues();
        Spectrum {
            min: ev.first().copied().unwrap_or_else(T::zero),
            max: ev.last().copied().unwrap_or_else(T::zero),
        }
    }

    pub fn is_psd(&self) -> bool {
        self.spectrum().is_psd()
    }

    /// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
    pub fn psd_projection(&self) -> Self {
        if self.side() == 0 {
            return self.clone();
        }
        let eig = self.data.clone().symmetric_eigen();
        let clipped = eig
            .eigenvalues
            .map(|v| num_traits::Float::max(v, T::zero()));
        let m = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
        Self::from_matrix(&m)
    }

    /// Quadratic form `v^T A v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.side() {
            for j in 0..self.side() {
                acc += v[i] * self.data[(i, j)] * v[j];
            }
        }
        acc
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> SymMatrix<U> {
        SymMatrix {
            data: self.data.map(f),
        }
    }
}

/// Sparse symmetric matrix stored as upper-triangle entries `(i, j, v)` with
/// `i ≤ j`; an off-diagonal entry stands for both `(i, j)` and `(j, i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSym<T> {
    side: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Real> SparseSym<T> {
    pub fn new(side: usize) -> Self {
        SparseSym {
            side,
            entries: Vec::new(),
        }
    }

    /// Adds `v` to entry `(i, j)`; indices may come in either order.
    pub fn push(&mut self, i: usize, j: usize, v: T) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        debug_assert!(j < self.side);
        if let Some(e) = self.entries.iter_mut().find(|e| e.0 == i && e.1 == j) {
            e.2 += v;
        } else {
            self.entries.push((i, j, v));
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> SymMatrix<T> {
        let mut m = SymMatrix::zeros(self.side);
        for &(i, j, v) in &self.entries {
            m.add_sym(i, j, v);
        }
        m
    }

    /// `⟨X, B⟩ = trace(X B)`.
    pub fn inner_dense(&self, x: &SymMatrix<T>) -> T {
        let two = T::one() + T::one();
        self.entries.iter().fold(T::zero(), |acc, &(i, j, v)| {
            if i == j {
                acc + v * x.get(i, i)
            } else {
                acc + two * v * x.get(i, j)
            }
        })
    }

    /// `acc += s·B`.
    pub fn accumulate_into(&self, acc: &mut SymMatrix<T>, s: T) {
        for &(i, j, v) in &self.entries {
            acc.add_sym(i, j, s * v);
        }
    }
}
