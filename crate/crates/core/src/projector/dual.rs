use super::ProjectionProblem;
use crate::conemodel::build_truncation;
use crate::error::{Error, Result};
use crate::momentkit::{localizing_matrix, riesz, MomentSequence};
use crate::polyalg::{factorial, Exponent, MonomialIndex, NormKind};
use crate::sdpcore::{solve, BlockKind, SdpProblem, SdpSolution, Sense, SolverConfig};

#[derive(Clone, Debug)]
pub struct DualMomentResult {
    pub solution: SdpSolution,
    pub moments: MomentSequence<f64>,
    /// `−L_{y*}(f)`, recomputed from the moments.
    pub value: f64,
}

/// `sup −L_y(f)` subject to `M_{t−v_J}(g_J y) ⪰ 0`, `L_y(1) ≤ 1` and
/// `L_y(x_i^{2k}) ≤ (2k)!` (`ℓw`) or `L_y(x_i^{2d}) ≤ 1` (`ℓ1`).
///
/// The constraint matrices come from [`localizing_matrix`] on unit sequences,
/// so this shares no matrix assembly with the primal formulations.
pub fn dual_moment_problem(p: &ProjectionProblem, cfg: &SolverConfig) -> Result<DualMomentResult> {
    let sdp = dual_moment_sdp(p)?;
    let solution = solve(&sdp, cfg)?;
    if !super::accepted(&solution, cfg) {
        return Err(Error::Solver(format!("dual moment problem: solver status {}", solution.status)));
    }
    let moments = MomentSequence::from_values(p.nvars(), 2 * p.level, solution.dual.clone())?;
    let value = -riesz(&moments, &p.f)?;
    Ok(DualMomentResult {
        solution,
        moments,
        value,
    })
}

/// The SDP solved by [`dual_moment_problem`]: its free variables are the
/// moments `y_α`, `α ∈ N^n_{2t}`.
pub fn dual_moment_sdp(p: &ProjectionProblem) -> Result<SdpProblem> {
    let n = p.nvars();
    let deg = 2 * p.level;
    let idx = MonomialIndex::new(n, deg)?;
    let mut sdp = SdpProblem::new(Sense::Min);
    sdp.push_comment(format!("moment dual, norm {}, d {}, level {}", p.norm.kind(), p.d, p.level));
    for e in idx.basis() {
        sdp.add_constraint(-p.f.coeff(e));
    }
    let trunc = build_truncation(&p.system, p.level)?;
    for block in trunc.blocks() {
        let b = sdp.add_block(BlockKind::Psd, block.side());
        for (row, e) in idx.basis().iter().enumerate() {
            let unit = MomentSequence::from_fn(n, deg, |a| if a == e { 1.0 } else { 0.0 })?;
            let m = localizing_matrix(&unit, &block.product, block.sos_order)?;
            for i in 0..m.side() {
                for j in i..m.side() {
                    let v = m.get(i, j);
                    if v != 0.0 {
                        sdp.add_constraint_entry(row, b, i, j, -v)?;
                    }
                }
            }
        }
    }
    let mut bounds: Vec<(Exponent, f64)> = vec![(Exponent::zero(n), 1.0)];
    for var in 0..n {
        match p.norm.kind() {
            NormKind::L1 => bounds.push((Exponent::power(n, var, 2 * p.d), 1.0)),
            NormKind::LW => {
                for k in 1..=p.d {
                    let w = factorial(2 * k).ok_or(Error::WeightOverflow { degree: 2 * k })?;
                    bounds.push((Exponent::power(n, var, 2 * k), w));
                }
            }
        }
    }
    let lp = sdp.add_block(BlockKind::NonnegDiag, bounds.len());
    for (j, (e, bound)) in bounds.iter().enumerate() {
        sdp.add_objective_entry(lp, j, j, *bound)?;
        let row = idx.position(e).expect("bounded moments have degree ≤ 2t");
        sdp.add_constraint_entry(row, lp, j, j, 1.0)?;
    }

    Ok(sdp)
}
