use super::{add_cone_rows, ConeRows, Perturbation, ProjectionCertificate, ProjectionProblem};
use crate::conemodel::{build_truncation, ConeTruncation, SemialgebraicSystem};
use crate::error::{Error, Result};
use crate::momentkit::MomentSequence;
use crate::polyalg::{MonomialIndex, NormKind, Poly};
use crate::sdpcore::{solve, BlockKind, SdpProblem, SdpSolution, Sense, SolveStatus, SolverConfig};

fn require_optimal(sol: &SdpSolution, cfg: &SolverConfig, what: &str) -> Result<()> {
    match sol.status {
        _ if super::accepted(sol, cfg) => Ok(()),
        // the lifted polynomial is always in the cone, so a certificate of
        // infeasibility can only be numerical noise
        SolveStatus::Infeasible => Err(Error::Solver(format!(
            "{what}: numerical failure (solver reported an infeasible lift)"
        ))),
        s => Err(Error::Solver(format!("{what}: solver status {s}"))),
    }
}

type Built = (SdpProblem, ConeTruncation<f64>, ConeRows, usize);

fn build_lambda(p: &ProjectionProblem) -> Result<Built> {
    let trunc = build_truncation(&p.system, p.level)?;
    let basis = p.perturbation_basis();
    let mut sdp = SdpProblem::new(Sense::Min);
    sdp.push_comment(format!("lambda-form projection, norm {}, d {}, level {}", p.norm.kind(), p.d, p.level));
    let lam = sdp.add_block(BlockKind::NonnegDiag, basis.len());
    for j in 0..basis.len() {
        sdp.add_objective_entry(lam, j, j, 1.0)?;
    }
    let cone = add_cone_rows(&mut sdp, &trunc, |e| p.f.coeff(e))?;
    for (j, (_, q)) in basis.iter().enumerate() {
        for (e, &c) in q.terms() {
            let row = cone.rows.position(e).expect("perturbations have degree ≤ 2t");
            sdp.add_constraint_entry(row, lam, j, j, -c)?;
        }
    }
    Ok((sdp, trunc, cone, lam))
}

/// The SDP solved by [`project_lambda_form`]; block 0 holds `λ`.
pub fn lambda_form_sdp(p: &ProjectionProblem) -> Result<SdpProblem> {
    Ok(build_lambda(p)?.0)
}

/// Minimizes `Σ_j λ_j` subject to `f + Σ_j λ_j q_j` in the truncated cone,
/// with `q_j` from [`ProjectionProblem::perturbation_basis`].
pub fn project_lambda_form(p: &ProjectionProblem, cfg: &SolverConfig) -> Result<ProjectionCertificate> {
    let (sdp, trunc, cone, lam) = build_lambda(p)?;
    let basis = p.perturbation_basis();
    let sol = solve(&sdp, cfg)?;
    require_optimal(&sol, cfg, "lambda-form projection")?;


    let lambda: Vec<(Perturbation, f64)> = basis
        .iter()
        .enumerate()
        .map(|(j, (k, _))| (k.clone(), sol.primal[lam].get(j, j)))
        .collect();
    let mut projection = p.f.clone();
    for ((_, q), &(_, l)) in basis.iter().zip(&lambda) {
        projection = projection.add(&q.scale(&l))?;
    }
    let y: Vec<f64> = sol.dual.iter().map(|v| -v).collect();
    Ok(ProjectionCertificate {
        norm: p.norm.kind(),
        d: p.d,
        level: p.level,
        status: sol.status,
        p_value: lambda.iter().map(|&(_, v)| v).sum(),
        lambda,
        grams: trunc
            .blocks()
            .iter()
            .zip(&cone.blocks)
            .map(|(b, &i)| (b.label.clone(), sol.primal[i].clone()))
            .collect(),
        projection,
        dual_moments: Some(MomentSequence::from_values(p.nvars(), 2 * p.level, y)?),
    })
}

fn build_general(p: &ProjectionProblem) -> Result<(Built, MonomialIndex, Vec<f64>)> {
    let trunc = build_truncation(&p.system, p.level)?;
    let low = MonomialIndex::new(p.nvars(), 2 * p.d)?;
    let mut sdp = SdpProblem::new(Sense::Min);
    sdp.push_comment(format!("general-form projection, norm {}, d {}, level {}", p.norm.kind(), p.d, p.level));
    let ub = sdp.add_block(BlockKind::NonnegDiag, low.len());
    let vb = sdp.add_block(BlockKind::NonnegDiag, low.len());
    let weights = low
        .basis()
        .iter()
        .map(|e| p.norm.weight::<f64>(e))
        .collect::<Result<Vec<_>>>()?;
    for (k, &w) in weights.iter().enumerate() {
        sdp.add_objective_entry(ub, k, k, w)?;
        sdp.add_objective_entry(vb, k, k, w)?;
    }
    let cone = add_cone_rows(&mut sdp, &trunc, |e| {
        if e.total_degree() <= 2 * p.d {
            p.f.coeff(e)
        } else {
            0.0
        }
    })?;
    for (k, e) in low.basis().iter().enumerate() {
        let row = cone.rows.position(e).expect("2d ≤ 2t");
        sdp.add_constraint_entry(row, ub, k, k, -1.0)?;
        sdp.add_constraint_entry(row, vb, k, k, 1.0)?;
    }
    debug_assert_eq!(vb, ub + 1);
    Ok(((sdp, trunc, cone, ub), low, weights))
}

/// The SDP solved by [`project_general_form`]; blocks 0 and 1 hold the
/// positive and negative coefficient changes.
pub fn general_form_sdp(p: &ProjectionProblem) -> Result<SdpProblem> {
    Ok(build_general(p)?.0 .0)
}

/// Minimizes `Σ_α w_α (u_α + v_α)` subject to `h = f + u − v` on `N^n_{2d}`,
/// `h_α = 0` above `2d`, and `h` in the truncated cone.
pub fn project_general_form(p: &ProjectionProblem, cfg: &SolverConfig) -> Result<ProjectionCertificate> {
    let ((sdp, trunc, cone, ub), low, weights) = build_general(p)?;
    let vb = ub + 1;
    let sol = solve(&sdp, cfg)?;
    require_optimal(&sol, cfg, "general-form projection")?;

    let mut lambda = Vec::with_capacity(low.len());
    let mut diff = Vec::with_capacity(low.len());
    let mut p_value = 0.0;
    for (k, e) in low.basis().iter().enumerate() {
        let (u, v) = (sol.primal[ub].get(k, k), sol.primal[vb].get(k, k));
        lambda.push((Perturbation::Monomial(e.clone()), u + v));
        diff.push((e.clone(), u - v));
        p_value += weights[k] * (u + v);
    }
    let projection = p.f.add(&Poly::from_terms(p.nvars(), diff)?)?;
    Ok(ProjectionCertificate {
        norm: p.norm.kind(),
        d: p.d,
        level: p.level,
        status: sol.status,
        lambda,
        grams: trunc
            .blocks()
            .iter()
            .zip(&cone.blocks)
            .map(|(b, &i)| (b.label.clone(), sol.primal[i].clone()))
            .collect(),
        p_value,
        projection,
        dual_moments: None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureRow {
    pub t: u32,
    pub p_value: f64,
    pub lambda: Vec<(Perturbation, f64)>,
}

/// Projections of `f` onto `P_t(g) ∩ R[x]_{2d}` for each `t`, in the given
/// order. The values are nonincreasing in `t` up to solver accuracy.
pub fn closure_probe(
    f: &Poly<f64>,
    system: &SemialgebraicSystem<f64>,
    norm: NormKind,
    d: u32,
    ts: &[u32],
    cfg: &SolverConfig,
) -> Result<Vec<ClosureRow>> {
    ts.iter()
        .map(|&t| {
            let p = ProjectionProblem::truncated(f.clone(), system.clone(), norm, d, t)?;
            let c = project_lambda_form(&p, cfg)?;
            Ok(ClosureRow {
                t,
                p_value: c.p_value,
                lambda: c.lambda,
            })
        })
        .collect()
}
