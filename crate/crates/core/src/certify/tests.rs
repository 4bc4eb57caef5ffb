use super::*;
use crate::conemodel::ConeKind;
use crate::polyalg::{parse_polynomial, NormKind};
use crate::projector::{project_lambda_form, projector_config, ProjectionProblem};

const MOTZKIN: &str = "x1^2*x2^2*(x1^2+x2^2-1)+1/27";

fn poly(s: &str, n: usize) -> Poly<f64> {
    parse_polynomial(s, n).unwrap()
}

fn interval() -> SemialgebraicSystem<f64> {
    SemialgebraicSystem::new(1, vec![poly("x1", 1), poly("1 - x1", 1)], ConeKind::Preordering).unwrap()
}

#[test]
fn square_is_rank_one() {
    let f = poly("(1 + x1 + x2)^2", 2);
    let v = membership(&f, &SemialgebraicSystem::unconstrained(2), 1, &SolverConfig::default()).unwrap();
    let MembershipVerdict::InCone(c) = v else {
        panic!("expected a certificate, got {v}");
    };
    let eig = c.grams[0].1.eigenvalues();
    assert!((eig[2] - 3.0).abs() < 1e-6, "{eig:?}");
    assert!(eig[1].abs() < 1e-6 && eig[0].abs() < 1e-6, "{eig:?}");
}

#[test]
fn motzkin_separated() {
    let f = poly(MOTZKIN, 2);
    let v = membership(&f, &SemialgebraicSystem::unconstrained(2), 3, &SolverConfig::default()).unwrap();
    let MembershipVerdict::NotInConeAtLevel(s) = v else {
        panic!("expected a separator, got {v}");
    };
    assert!(s.riesz_value < -1e-6);
    assert!(s.min_eigenvalue >= -EIG_TOL);
}

#[test]
fn motzkin_projection_in_cone() {
    let f = poly(MOTZKIN, 2);
    let p = ProjectionProblem::new(f, SemialgebraicSystem::unconstrained(2), NormKind::L1, 3).unwrap();
    let c = project_lambda_form(&p, &projector_config()).unwrap();
    // the projection sits on the cone boundary; a hair of slack keeps the
    // feasibility problem strictly feasible
    let g = c.projection.add(&Poly::constant(2, 1e-7)).unwrap();
    let v = membership(&g, &p.system, 3, &SolverConfig::default()).unwrap();
    assert!(v.is_in_cone(), "{v}");
}

#[test]
fn degree_above_level_rejected() {
    let f = poly("x1^4", 1);
    assert!(membership(&f, &SemialgebraicSystem::unconstrained(1), 1, &SolverConfig::default()).is_err());
}

#[test]
fn positive_constant_certifies_at_one() {
    let q = PsatzQuery::new(poly("1", 2), SemialgebraicSystem::unconstrained(2), 0.5, 3, PsatzMode::Weighted).unwrap();
    let (out, steps) = psatz_search(&q, &SolverConfig::default()).unwrap();
    assert!(matches!(out, PsatzOutcome::CertifiedAt { d: 1, .. }), "{out}");
    assert_eq!(steps.len(), 1);
}

#[test]
fn certificate_persists_at_next_d() {
    let cfg = SolverConfig::default();
    let q = PsatzQuery::new(poly(MOTZKIN, 2), SemialgebraicSystem::unconstrained(2), 5e-2, 5, PsatzMode::Weighted).unwrap();
    let (out, _) = psatz_search(&q, &cfg).unwrap();
    let PsatzOutcome::CertifiedAt { d, level, .. } = out else {
        panic!("{out}");
    };
    let next = membership(&q.perturbed(d + 1).unwrap(), &q.system, level.max(d + 1), &cfg).unwrap();
    assert!(next.is_in_cone(), "{next}");
}

#[test]
fn negative_constant_never_certifies() {
    for mode in [PsatzMode::Weighted, PsatzMode::Power] {
        let q = PsatzQuery::new(poly("-1", 1), interval(), 0.1, 4, mode).unwrap();
        let (out, steps) = psatz_search(&q, &SolverConfig::default()).unwrap();
        assert_eq!(out, PsatzOutcome::NotFoundUpTo(4));
        assert!(steps.iter().all(|s| !s.verdict.is_in_cone()));
    }
}

#[test]
fn certified_interval_polynomial_is_nonnegative_on_samples() {
    // x(1 − x) ≥ 0 on [0, 1]
    let f = poly("x1 - x1^2", 1);
    let q = PsatzQuery::new(f, interval(), 1e-2, 3, PsatzMode::Weighted).unwrap();
    let (out, _) = psatz_search(&q, &SolverConfig::default()).unwrap();
    let PsatzOutcome::CertifiedAt { perturbed, .. } = out else {
        panic!("expected a certificate, got {out}");
    };
    let r = necessity_check(&perturbed, &q.system, 100, 2.0, 7);
    assert_eq!(r.samples, 100);
    assert!(r.holds(), "{r:?}");
}

#[test]
fn perturbation_shapes() {
    let c = perturbation(2, PsatzMode::Weighted, 2).unwrap();
    assert_eq!(c.len(), 5);
    assert!((c.coeff(&crate::polyalg::Exponent::new(vec![4, 0])) - 1.0 / 24.0).abs() < 1e-15);
    let t = perturbation(2, PsatzMode::Power, 3).unwrap();
    assert_eq!(t.len(), 3);
    assert_eq!(t.coeff(&crate::polyalg::Exponent::new(vec![0, 6])), 1.0);
}

#[test]
fn closure_probe_rejects_bad_eps() {
    let f = poly("x1^2", 1);
    let s = SemialgebraicSystem::unconstrained(1);
    let cfg = SolverConfig::default();
    assert!(seq_closure_probe(&f, &s, 1, &[0.1, 0.2], 2, &cfg).is_err());
    assert!(seq_closure_probe(&f, &s, 1, &[0.0], 2, &cfg).is_err());
}

#[test]
fn closure_probe_negative_constant() {
    let rows = seq_closure_probe(&poly("-1", 1), &interval(), 1, &[0.5, 0.1], 3, &SolverConfig::default()).unwrap();
    assert!(rows.iter().all(|r| r.minimal_t.is_none()));
}

#[test]
fn sampling_is_deterministic_and_inside() {
    let a = sample_points(&interval(), 20, 2.0, 3);
    let b = sample_points(&interval(), 20, 2.0, 3);
    assert_eq!(a, b);
    assert!(a.iter().all(|x| (0.0..=1.0).contains(&x[0])));
}
