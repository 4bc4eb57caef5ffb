//! Cone membership with revalidated certificates, the Positivstellensatz
//! search and the sequential-closure probe.

mod psatz;
mod sample;

use std::fmt;

use crate::conemodel::{build_truncation, gram_reconstruct, BlockLabel, ConeTruncation, SemialgebraicSystem};
use crate::error::{Error, Result};
use crate::momentkit::{localizing_matrix, riesz, MomentSequence, SymMatrix};
use crate::polyalg::Poly;
use crate::projector::{add_cone_rows, ConeRows};
use crate::sdpcore::{solve, SdpProblem, Sense, SolveStatus, SolverConfig};

pub use psatz::{
    perturbation, psatz_search, seq_closure_probe, ClosureEpsRow, PsatzMode, PsatzOutcome, PsatzQuery, PsatzStep,
};
pub use sample::{necessity_check, sample_points, NecessityReport};

/// Largest coefficient error of a revalidated Gram reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-6;
/// Relative eigenvalue tolerance of revalidated Gram and moment matrices.
pub const EIG_TOL: f64 = 1e-8;
/// A separating functional must satisfy `L_y(f) < −SEPARATION_TOL`.
pub const SEPARATION_TOL: f64 = 1e-9;

/// Gram certificate of `f ∈ P_k(g)` after revalidation.
#[derive(Clone, Debug, PartialEq)]
pub struct GramCertificate {
    pub level: u32,
    pub grams: Vec<(BlockLabel, SymMatrix<f64>)>,
    /// `max_α |Σ_J ⟨X_J, B^J_α⟩ − f_α|`
    pub reconstruction_error: f64,
    /// Smallest eigenvalue over all blocks, relative to `max(1, λ_max)`.
    pub min_eigenvalue: f64,
    /// Whether negative eigenvalues were clipped before revalidation.
    pub clipped: bool,
}

/// Moment functional separating `f` from `P_k(g)`, scaled to `‖y‖_∞ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatingFunctional {
    pub level: u32,
    pub moments: MomentSequence<f64>,
    /// `L_y(f)`, negative.
    pub riesz_value: f64,
    /// Smallest eigenvalue over all `M(g_J y)`, relative to `max(1, λ_max)`.
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MembershipVerdict {
    InCone(GramCertificate),
    NotInConeAtLevel(SeparatingFunctional),
    /// The solve proves nothing either way.
    Inconclusive { status: SolveStatus, reason: String },
}

impl MembershipVerdict {
    pub fn is_in_cone(&self) -> bool {
        matches!(self, MembershipVerdict::InCone(_))
    }

    pub fn is_separated(&self) -> bool {
        matches!(self, MembershipVerdict::NotInConeAtLevel(_))
    }
}

impl fmt::Display for MembershipVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipVerdict::InCone(c) => write!(
                f,
                "in-cone level {} reconstruction {:.3e} min-eig {:.3e}",
                c.level, c.reconstruction_error, c.min_eigenvalue
            ),
            MembershipVerdict::NotInConeAtLevel(s) => write!(
                f,
                "not-in-cone level {} riesz {:.6e} min-eig {:.3e}",
                s.level, s.riesz_value, s.min_eigenvalue
            ),
            MembershipVerdict::Inconclusive { status, reason } => write!(f, "inconclusive {status}: {reason}"),
        }
    }
}

fn relative_min(m: &SymMatrix<f64>) -> f64 {
    if m.side() == 0 {
        return 0.0;
    }
    let s = m.spectrum();
    s.min / s.max.max(1.0)
}

fn build_membership(
    f: &Poly<f64>,
    system: &SemialgebraicSystem<f64>,
    k: u32,
) -> Result<(SdpProblem, ConeTruncation<f64>, ConeRows)> {
    if f.nvars() != system.nvars() {
        return Err(Error::DimensionMismatch {
            expected: system.nvars(),
            found: f.nvars(),
        });
    }
    if f.degree() > 2 * k {
        return Err(Error::Invalid(format!(
            "deg f = {} exceeds the cone degree 2k = {}",
            f.degree(),
            2 * k
        )));
    }
    let trunc = build_truncation(system, k)?;
    let mut sdp = SdpProblem::new(Sense::Min);
    sdp.push_comment(format!("{} membership, level {k}", system.kind()));
    let cone = add_cone_rows(&mut sdp, &trunc, |e| f.coeff(e))?;
    Ok((sdp, trunc, cone))
}

/// The feasibility SDP solved by [`membership`]: zero objective, one Gram
/// block per cone block.
pub fn membership_sdp(f: &Poly<f64>, system: &SemialgebraicSystem<f64>, k: u32) -> Result<SdpProblem> {
    Ok(build_membership(f, system, k)?.0)
}

/// Decides `f ∈ P_k(g)` (or `Q_k(g)`) by a feasibility SDP. Both outcomes
/// are recomputed from scratch before they are reported; a certificate that
/// fails its check becomes [`MembershipVerdict::Inconclusive`].
pub fn membership(
    f: &Poly<f64>,
    system: &SemialgebraicSystem<f64>,
    k: u32,
    cfg: &SolverConfig,
) -> Result<MembershipVerdict> {
    let (sdp, trunc, cone) = build_membership(f, system, k)?;
    let sol = solve(&sdp, cfg)?;

    match sol.status {
        SolveStatus::Optimal => {
            let mut grams: Vec<SymMatrix<f64>> = cone.blocks.iter().map(|&b| sol.primal[b].clone()).collect();
            let mut clipped = false;
            let mut min_eig = grams.iter().map(relative_min).fold(f64::INFINITY, f64::min);
            if min_eig < 0.0 {
                grams = grams.iter().map(SymMatrix::psd_projection).collect();
                clipped = true;
                min_eig = grams.iter().map(relative_min).fold(f64::INFINITY, f64::min);
            }
            let h = gram_reconstruct(&trunc, &grams)?;
            let err = cone
                .rows
                .basis()
                .iter()
                .map(|e| (h.coeff(e) - f.coeff(e)).abs())
                .fold(0.0, f64::max);
            if err > RECONSTRUCTION_TOL || min_eig < -EIG_TOL {
                return Ok(MembershipVerdict::Inconclusive {
                    status: sol.status,
                    reason: format!("gram revalidation failed (reconstruction {err:.3e}, min-eig {min_eig:.3e})"),
                });
            }
            Ok(MembershipVerdict::InCone(GramCertificate {
                level: k,
                grams: trunc.blocks().iter().map(|b| b.label.clone()).zip(grams).collect(),
                reconstruction_error: err,
                min_eigenvalue: if min_eig.is_finite() { min_eig } else { 0.0 },
                clipped,
            }))
        }
        SolveStatus::Infeasible => {
            let Some(farkas) = sol.farkas.as_ref() else {
                return Ok(MembershipVerdict::Inconclusive {
                    status: sol.status,
                    reason: "no Farkas vector".into(),
                });
            };
            // b'y = 1 and Σ y_α B^J_α ⪯ 0, so z = −y separates
            let scale = farkas.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let z: Vec<f64> = farkas.iter().map(|v| -v / scale).collect();
            let moments = MomentSequence::from_values(f.nvars(), 2 * k, z)?;
            let riesz_value = riesz(&moments, f)?;
            let mut min_eig = f64::INFINITY;
            for block in trunc.blocks() {
                let m = localizing_matrix(&moments, &block.product, block.sos_order)?;
                min_eig = min_eig.min(relative_min(&m));
            }
            if riesz_value >= -SEPARATION_TOL || min_eig < -EIG_TOL {
                return Ok(MembershipVerdict::Inconclusive {
                    status: sol.status,
                    reason: format!("separator revalidation failed (L_y(f) {riesz_value:.3e}, min-eig {min_eig:.3e})"),
                });
            }
            Ok(MembershipVerdict::NotInConeAtLevel(SeparatingFunctional {
                level: k,
                moments,
                riesz_value,
                min_eigenvalue: min_eig,
            }))
        }
        status => Ok(MembershipVerdict::Inconclusive {
            status,
            reason: "solver did not reach a verdict".into(),
        }),
    }
}

#[cfg(test)]
mod tests;
