#![allow(dead_code)]

use psatz_core::conemodel::{build_truncation, gram_reconstruct, ConeKind, SemialgebraicSystem};
use psatz_core::momentkit::SymMatrix;
use psatz_core::polyalg::{monomial_basis, parse_polynomial, Poly};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const MOTZKIN: &str = "x1^2*x2^2*(x1^2+x2^2-1)+1/27";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn poly(s: &str, n: usize) -> Poly<f64> {
    parse_polynomial(s, n).unwrap()
}

pub fn motzkin() -> Poly<f64> {
    poly(MOTZKIN, 2)
}

/// `{1 − x1² − x2² ≥ 0}` as a quadratic module.
pub fn disk() -> SemialgebraicSystem<f64> {
    SemialgebraicSystem::new(2, vec![poly("1 - x1^2 - x2^2", 2)], ConeKind::QuadraticModule).unwrap()
}

/// `[0, 1]` as the preordering of `x1` and `1 − x1`.
pub fn interval() -> SemialgebraicSystem<f64> {
    SemialgebraicSystem::new(1, vec![poly("x1", 1), poly("1 - x1", 1)], ConeKind::Preordering).unwrap()
}

/// Dense polynomial of degree `deg` with uniform coefficients in `[−1, 1]`
/// and a nonzero top-degree term.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Poly<f64> {
    let mut terms: Vec<_> = monomial_basis(n, deg)
        .unwrap()
        .into_iter()
        .map(|e| (e, rng.random_range(-1.0..1.0)))
        .collect();
    let last = terms.len() - 1;
    terms[last].1 = if terms[last].1 < 0.0 { -1.0 } else { 1.0 };
    Poly::from_terms(n, terms).unwrap()
}

/// `B Bᵀ / side + shift·I` with uniform entries in `B`.
pub fn random_psd(rng: &mut ChaCha8Rng, side: usize, shift: f64) -> SymMatrix<f64> {
    let b: Vec<f64> = (0..side * side).map(|_| rng.random_range(-1.0..1.0)).collect();
    SymMatrix::from_upper(side, |i, j| {
        let dot: f64 = (0..side).map(|k| b[i * side + k] * b[j * side + k]).sum();
        dot / side as f64 + if i == j { shift } else { 0.0 }
    })
}

/// A cone element `Σ_J ⟨X_J, B^J_α⟩ x^α` with random positive definite `X_J`.
pub fn random_cone_element(
    rng: &mut ChaCha8Rng,
    system: &SemialgebraicSystem<f64>,
    k: u32,
) -> (Poly<f64>, Vec<SymMatrix<f64>>) {
    let trunc = build_truncation(system, k).unwrap();
    let grams: Vec<_> = trunc.blocks().iter().map(|b| random_psd(rng, b.side(), 0.1)).collect();
    (gram_reconstruct(&trunc, &grams).unwrap(), grams)
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-radius..radius)).collect()
}
