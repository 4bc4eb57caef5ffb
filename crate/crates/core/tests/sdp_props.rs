mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use psatz_core::certify::membership_sdp;
use psatz_core::conemodel::SemialgebraicSystem;
use psatz_core::momentkit::SymMatrix;
use psatz_core::polyalg::NormKind;
use psatz_core::projector::{dual_moment_sdp, lambda_form_sdp, ProjectionProblem};
use psatz_core::sdpcore::*;
use rand::Rng;

fn random_sym(r: &mut impl Rng, n: usize) -> SymMatrix<f64> {
    SymMatrix::from_upper(n, |_, _| r.random_range(-1.0..1.0))
}

fn orthogonal(r: &mut impl Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0)).qr().q()
}

/// `Q diag(v) Qᵀ`
fn conjugate(q: &DMatrix<f64>, v: &[f64]) -> SymMatrix<f64> {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v));
    SymMatrix::from_matrix(&(q * d * q.transpose()))
}

struct Planted {
    problem: SdpProblem,
    x: SymMatrix<f64>,
    objective: f64,
}

/// Strictly complementary pair `X* = Q diag(a, 0) Qᵀ`, `S* = Q diag(0, b) Qᵀ`
/// with `C = Σ y*_i A_i + S*` and `b_i = ⟨A_i, X*⟩`, so the optimal value is
/// `b'y*`.
fn planted(seed: u64, n: usize, rank: usize, sense: Sense) -> Planted {
    let mut r = common::rng(seed);
    let q = orthogonal(&mut r, n);
    let a: Vec<f64> = (0..n).map(|i| if i < rank { r.random_range(0.5..2.0) } else { 0.0 }).collect();
    let b: Vec<f64> = (0..n).map(|i| if i < rank { 0.0 } else { r.random_range(0.5..2.0) }).collect();
    let x = conjugate(&q, &a);
    let mut c = conjugate(&q, &b);
    let m = (rank * (rank + 1) / 2 + r.random_range(1..=n)).min(30);
    let mut p = SdpProblem::new(sense);
    let blk = p.add_block(BlockKind::Psd, n);
    let mut objective = 0.0;
    for _ in 0..m {
        let ai = random_sym(&mut r, n);
        let yi: f64 = r.random_range(-1.0..1.0);
        let bi = ai.inner(&x);
        objective += yi * bi;
        c = c.add(&ai.scale(yi));
        let k = p.add_constraint(bi);
        for i in 0..n {
            for j in i..n {
                p.add_constraint_entry(k, blk, i, j, ai.get(i, j)).unwrap();
            }
        }
    }
    // max ⟨C', X⟩ with C' = −C is the same problem as min ⟨C, X⟩.
    let s = if sense == Sense::Max { -1.0 } else { 1.0 };
    for i in 0..n {
        for j in i..n {
            p.add_objective_entry(blk, i, j, s * c.get(i, j)).unwrap();
        }
    }
    Planted { problem: p, x, objective: s * objective }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn recovers_planted_optimum(seed in any::<u64>(), n in 2usize..=10, rank_frac in 0.0f64..1.0, max in any::<bool>()) {
        let rank = (1 + ((n - 1) as f64 * rank_frac) as usize).min(6);
        let sense = if max { Sense::Max } else { Sense::Min };
        let pl = planted(seed, n, rank, sense);
        let sol = solve(&pl.problem, &SolverConfig::default()).unwrap();
        prop_assert_eq!(sol.status, SolveStatus::Optimal);
        let scale = pl.objective.abs().max(1.0);
        prop_assert!((sol.primal_objective - pl.objective).abs() <= 1e-5 * scale,
            "{} vs {}", sol.primal_objective, pl.objective);
        let rep = check_certificate(&pl.problem, &sol);
        prop_assert!(rep.max_constraint_residual <= 1e-6);
        prop_assert!(rep.primal_min_eig[0] >= -1e-7);
        prop_assert!(rep.dual_min_eig[0] >= -1e-6);
        prop_assert!(rep.gap.abs() <= 1e-5 * scale);
    }

    #[test]
    fn weak_duality_against_planted_points(seed in any::<u64>(), n in 2usize..6) {
        // The planted X* is primal feasible and the solver's y is dual feasible.
        let pl = planted(seed, n, 1, Sense::Min);
        let sol = solve(&pl.problem, &SolverConfig::default()).unwrap();
        let rep = check_certificate(&pl.problem, &sol);
        prop_assert!(rep.dual_min_eig[0] >= -1e-6);
        let c_dot_x: f64 = pl.problem.objective().iter()
            .map(|(_, i, j, v)| if i == j { v * pl.x.get(i, i) } else { 2.0 * v * pl.x.get(i, j) })
            .sum();
        prop_assert!(c_dot_x >= rep.dual_objective - 1e-6 * pl.objective.abs().max(1.0));
    }

    #[test]
    fn sdpa_roundtrip_is_exact(seed in any::<u64>(), n in 1usize..5, max in any::<bool>()) {
        let pl = planted(seed, n, 1, if max { Sense::Max } else { Sense::Min });
        let mut p = pl.problem;
        let lp = p.add_block(BlockKind::NonnegDiag, 2);
        let k = p.add_constraint(0.25);
        p.add_constraint_entry(k, lp, 1, 1, 1.0).unwrap();
        p.push_comment(format!("seed {seed}"));
        let text = export_sdpa(&p);
        let back = parse_sdpa(&text).unwrap();
        prop_assert_eq!(&back, &p);
        prop_assert_eq!(export_sdpa(&back), text);
    }
}

#[test]
fn infeasible_has_farkas_certificate() {
    // X ⪰ 0 with X11 = −1 is empty.
    let mut p = SdpProblem::new(Sense::Min);
    let b = p.add_block(BlockKind::Psd, 2);
    let k = p.add_constraint(-1.0);
    p.add_constraint_entry(k, b, 0, 0, 1.0).unwrap();
    p.add_objective_entry(b, 1, 1, 1.0).unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
    let y = sol.farkas.unwrap();
    assert!((-y[0] - 1.0).abs() < 1e-9);
    assert!(y[0] < 0.0);
}

fn fixtures() -> Vec<(&'static str, SdpProblem)> {
    let motzkin = |norm| ProjectionProblem::new(common::motzkin(), SemialgebraicSystem::unconstrained(2), norm, 3).unwrap();
    vec![
        ("motzkin_l1_lambda.dat-s", lambda_form_sdp(&motzkin(NormKind::L1)).unwrap()),
        ("motzkin_lw_dual.dat-s", dual_moment_sdp(&motzkin(NormKind::LW)).unwrap()),
        ("disk_membership.dat-s", membership_sdp(&common::poly("1 - x1^2", 2), &common::disk(), 1).unwrap()),
    ]
}

#[test]
fn golden_sdpa_exports() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    for (name, p) in fixtures() {
        let text = export_sdpa(&p);
        let path = dir.join(name);
        if std::env::var_os("PSATZ_BLESS").is_some() {
            std::fs::write(&path, &text).unwrap();
        }
        let golden = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, golden, "{name} drifted");
        assert_eq!(parse_sdpa(&golden).unwrap(), p);
    }
}
