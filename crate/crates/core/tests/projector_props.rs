mod common;

use proptest::prelude::*;
use psatz_core::conemodel::{build_truncation, gram_reconstruct, SemialgebraicSystem};
use psatz_core::momentkit::{dual_norm, MomentSequence};
use psatz_core::polyalg::{NormKind, Poly};
use psatz_core::projector::*;

fn norm_of(l1: bool) -> NormKind {
    if l1 {
        NormKind::L1
    } else {
        NormKind::LW
    }
}

fn system(which: usize) -> SemialgebraicSystem<f64> {
    match which {
        0 => SemialgebraicSystem::unconstrained(2),
        1 => common::disk(),
        _ => common::interval(),
    }
}

fn instance(seed: u64, which: usize, l1: bool, d: u32) -> ProjectionProblem {
    let sys = system(which);
    let f = common::random_poly(&mut common::rng(seed), sys.nvars(), 2 * d);
    ProjectionProblem::new(f, sys, norm_of(l1), d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lambdas_are_nonnegative_and_sum_to_p(seed in any::<u64>(), which in 0usize..3, l1 in any::<bool>()) {
        let p = instance(seed, which, l1, 2);
        let c = project_lambda_form(&p, &projector_config()).unwrap();
        let scale = c.p_value.max(1.0);
        prop_assert!(c.lambda.iter().all(|(_, v)| *v >= -1e-9 * scale));
        let sum: f64 = c.lambda.iter().map(|(_, v)| v).sum();
        prop_assert!((sum - c.p_value).abs() <= 1e-9 * scale);
        // the projection is f plus the weighted perturbations
        let mut g = p.f.clone();
        for ((key, q), (k2, v)) in p.perturbation_basis().iter().zip(&c.lambda) {
            prop_assert_eq!(key, k2);
            g = g.add(&q.scale(v)).unwrap();
        }
        prop_assert!(g.sub(&c.projection).unwrap().max_abs_coeff() <= 1e-12 * g.max_abs_coeff().max(1.0));
    }

    #[test]
    fn formulations_agree(seed in any::<u64>(), which in 0usize..3, l1 in any::<bool>()) {
        let p = instance(seed, which, l1, 2);
        let cfg = projector_config();
        let a = project_lambda_form(&p, &cfg).unwrap().p_value;
        let b = project_general_form(&p, &cfg).unwrap().p_value;
        let c = dual_moment_problem(&p, &cfg).unwrap().value;
        let tol = 1e-6 * a.abs().max(1.0);
        prop_assert!((a - b).abs() <= tol, "lambda {a} general {b}");
        prop_assert!((a - c).abs() <= tol, "lambda {a} dual {c}");
    }

    #[test]
    fn grams_reconstruct_the_projection(seed in any::<u64>(), which in 0usize..3, l1 in any::<bool>()) {
        let p = instance(seed, which, l1, 2);
        for c in [
            project_lambda_form(&p, &projector_config()).unwrap(),
            project_general_form(&p, &projector_config()).unwrap(),
        ] {
            let trunc = build_truncation(&p.system, p.level).unwrap();
            let grams: Vec<_> = c.grams.iter().map(|(_, m)| m.clone()).collect();
            let h = gram_reconstruct(&trunc, &grams).unwrap();
            prop_assert!(h.sub(&c.projection).unwrap().max_abs_coeff() <= 1e-6);
            prop_assert!(grams.iter().all(|g| g.side() == 0 || g.spectrum().min >= -1e-7 * g.max_abs().max(1.0)));
        }
    }

    #[test]
    fn nonincreasing_in_d(seed in any::<u64>(), which in 0usize..3, l1 in any::<bool>()) {
        let p2 = instance(seed, which, l1, 1);
        let p3 = ProjectionProblem::new(p2.f.clone(), p2.system.clone(), norm_of(l1), 2).unwrap();
        let cfg = projector_config();
        let a = project_lambda_form(&p2, &cfg).unwrap().p_value;
        let b = project_lambda_form(&p3, &cfg).unwrap().p_value;
        prop_assert!(b <= a + 1e-7 * a.max(1.0), "d=1 {a} d=2 {b}");
    }

    #[test]
    fn point_masses_bound_p_below(seed in any::<u64>(), which in 0usize..3, l1 in any::<bool>()) {
        // δ_x / ‖δ_x‖* is dual feasible for x ∈ K, so p ≥ −f(x) / ‖δ_x‖*.
        let p = instance(seed, which, l1, 2);
        let c = project_lambda_form(&p, &projector_config()).unwrap();
        let n = p.nvars();
        for x in psatz_core::certify::sample_points(&p.system, 20, 2.0, seed) {
            let y = MomentSequence::from_atoms(n, 4, &[(1.0, x.clone())]).unwrap();
            let bound = -p.f.eval(&x) / dual_norm(&y, &p.norm);
            prop_assert!(c.p_value >= bound - 1e-7 * bound.abs().max(1.0), "p {} bound {}", c.p_value, bound);
        }
        prop_assert!(c.p_value >= -1e-9);
    }
}

#[test]
fn cone_members_project_to_zero() {
    for which in 0..3 {
        let sys = system(which);
        let (f, _) = common::random_cone_element(&mut common::rng(which as u64), &sys, 2);
        for norm in [NormKind::L1, NormKind::LW] {
            let p = ProjectionProblem::new(f.clone(), sys.clone(), norm, 2).unwrap();
            let c = project_lambda_form(&p, &projector_config()).unwrap();
            assert!(c.p_value.abs() < 1e-7, "{which} {norm:?} {}", c.p_value);
            assert!(c.effectively_zero());
        }
    }
    let p = ProjectionProblem::new(Poly::constant(2, -2.0), system(0), NormKind::LW, 1).unwrap();
    let c = project_lambda_form(&p, &projector_config()).unwrap();
    assert!((c.p_value - 2.0).abs() < 1e-7);
}
