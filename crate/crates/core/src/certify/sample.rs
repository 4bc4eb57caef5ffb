use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conemodel::SemialgebraicSystem;
use crate::polyalg::Poly;

/// Rejection attempts per requested point before giving up.
const ATTEMPTS_PER_POINT: usize = 10_000;

/// Up to `count` points of `K ∩ [−radius, radius]^n`, drawn uniformly from
/// the box and filtered by membership. Fewer points come back when `K` is
/// thin inside the box.
pub fn sample_points(system: &SemialgebraicSystem<f64>, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let n = system.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * ATTEMPTS_PER_POINT {
        if out.len() == count {
            break;
        }
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-radius..=radius)).collect();
        if system.contains(&x, 0.0) {
            out.push(x);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct NecessityReport {
    pub samples: usize,
    pub min_value: f64,
    /// `max(1, max_α |h_α|)`
    pub scale: f64,
}

impl NecessityReport {
    /// `min h ≥ −1e-7 · scale` over the samples.
    pub fn holds(&self) -> bool {
        self.min_value >= -1e-7 * self.scale
    }
}

/// Evaluates `h` on sampled points of `K`; a certified `h` must be
/// nonnegative there.
pub fn necessity_check(
    h: &Poly<f64>,
    system: &SemialgebraicSystem<f64>,
    count: usize,
    radius: f64,
    seed: u64,
) -> NecessityReport {
    let pts = sample_points(system, count, radius, seed);
    let min_value = pts.iter().map(|x| h.eval(x)).fold(f64::INFINITY, f64::min);
    NecessityReport {
        samples: pts.len(),
        min_value,
        scale: h.max_abs_coeff().max(1.0),
    }
}
