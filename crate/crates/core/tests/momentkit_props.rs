mod common;

use proptest::prelude::*;
use psatz_core::momentkit::*;
use psatz_core::polyalg::*;
use rand::Rng;

fn atoms(seed: u64, n: usize, count: usize, radius: f64) -> Vec<(f64, Vec<f64>)> {
    let mut r = common::rng(seed);
    (0..count)
        .map(|_| (r.random_range(0.1..1.0), common::random_point(&mut r, n, radius)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atomic_moment_matrices_are_psd(seed in any::<u64>(), n in 1usize..3, count in 1usize..6, d in 1u32..4) {
        let y = MomentSequence::from_atoms(n, 2 * d, &atoms(seed, n, count, 1.2)).unwrap();
        let m = moment_matrix(&y, d).unwrap();
        prop_assert!(m.is_psd());
        prop_assert!(y.claims_measure());
        let spec = m.spectrum();
        let rank = m.eigenvalues().iter().filter(|&&e| e > 1e-9 * spec.max.max(1.0)).count();
        prop_assert!(rank <= count);
    }

    #[test]
    fn dual_norm_grows_with_degree(seed in any::<u64>(), n in 1usize..3, deg in 1u32..6) {
        let mut r = common::rng(seed);
        let y = MomentSequence::from_fn(n, deg, |_| r.random_range(-10.0..10.0)).unwrap();
        for w in [WeightSequence::l1(), WeightSequence::lw()] {
            let mut last = 0.0;
            for k in 0..=deg {
                let v = dual_norm(&y.truncate(k).unwrap(), &w);
                prop_assert!(v >= last);
                last = v;
            }
        }
    }

    #[test]
    fn localizing_routes_agree(seed in any::<u64>(), n in 1usize..4, d in 0u32..4, gdeg in 0u32..3) {
        let mut r = common::rng(seed);
        let g = common::random_poly(&mut r, n, gdeg);
        let deg = 2 * d + g.degree();
        let y = MomentSequence::from_fn(n, deg, |_| r.random_range(-1.0..1.0)).unwrap();
        let entrywise = localizing_matrix(&y, &g, d).unwrap();
        let combined = build_basis_matrices(&g, d).unwrap().combine(|a| y.get(a)).unwrap();
        prop_assert!(entrywise.max_abs_diff(&combined) <= 1e-12 * entrywise.max_abs().max(1.0));
    }

    #[test]
    fn basis_matrices_reconstruct_pointwise(seed in any::<u64>(), n in 1usize..4, d in 0u32..4) {
        let mut r = common::rng(seed);
        let g = common::random_poly(&mut r, n, 2);
        let x = common::random_point(&mut r, n, 1.3);
        let set = build_basis_matrices(&g, d).unwrap();
        let v = MonomialIndex::new(n, d).unwrap().eval_monomials(&x);
        let direct = SymMatrix::outer(&v).scale(g.eval(&x));
        let via = set.evaluate(&x);
        prop_assert!(direct.max_abs_diff(&via) <= 1e-9 * direct.max_abs().max(1.0));
    }

    #[test]
    fn riesz_is_linear(seed in any::<u64>(), n in 1usize..3, a in -3.0f64..3.0) {
        let mut r = common::rng(seed);
        let f = common::random_poly(&mut r, n, 3);
        let g = common::random_poly(&mut r, n, 3);
        let y = MomentSequence::from_fn(n, 3, |_| r.random_range(-1.0..1.0)).unwrap();
        let lhs = riesz(&y, &f.scale(&a).add(&g).unwrap()).unwrap();
        let rhs = a * riesz(&y, &f).unwrap() + riesz(&y, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs()).max(1.0));
    }

    #[test]
    fn riesz_of_atoms_is_integration(seed in any::<u64>(), n in 1usize..3) {
        let pts = atoms(seed, n, 3, 1.0);
        let f = common::random_poly(&mut common::rng(seed ^ 3), n, 4);
        let y = MomentSequence::from_atoms(n, 4, &pts).unwrap();
        let direct: f64 = pts.iter().map(|(w, p)| w * f.eval(p)).sum();
        prop_assert!((riesz(&y, &f).unwrap() - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn moment_file_roundtrip(seed in any::<u64>(), n in 1usize..3, deg in 0u32..5) {
        let mut r = common::rng(seed);
        let y = MomentSequence::from_fn(n, deg, |_| r.random_range(-5.0..5.0)).unwrap();
        let back: MomentSequence<f64> = parse_moments(&format_moments(&y)).unwrap();
        prop_assert_eq!(back, y);
    }

    #[test]
    fn dual_norm_bounds_riesz(seed in any::<u64>(), n in 1usize..3) {
        // |L_y(f)| ≤ ‖y‖*_w ‖f‖_w
        let mut r = common::rng(seed);
        let f = common::random_poly(&mut r, n, 4);
        let y = MomentSequence::from_fn(n, 4, |_| r.random_range(-30.0..30.0)).unwrap();
        let w = WeightSequence::lw();
        let bound = dual_norm(&y, &w) * weighted_norm(&f, &w).unwrap();
        prop_assert!(riesz(&y, &f).unwrap().abs() <= bound * (1.0 + 1e-12));
    }
}
