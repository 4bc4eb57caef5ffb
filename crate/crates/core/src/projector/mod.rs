//! Canonical `ℓ_w` projections of a polynomial onto truncated cones, in two
//! primal formulations plus the moment dual.

mod dual;
mod forms;
mod text;

use std::fmt;

use crate::conemodel::{BlockLabel, ConeTruncation, SemialgebraicSystem};
use crate::error::{Error, Result};
use crate::momentkit::{MomentSequence, SymMatrix};
use crate::polyalg::{factorial, Exponent, NormKind, Poly, WeightSequence};
use crate::sdpcore::{SdpProblem, SdpSolution, SolveStatus, SolverConfig};

pub use dual::{dual_moment_problem, dual_moment_sdp, DualMomentResult};
pub use forms::{
    closure_probe, general_form_sdp, lambda_form_sdp, project_general_form, project_lambda_form, ClosureRow,
};
pub use text::{format_certificate, parse_certificate, ParsedCertificate};

/// Values at or below this are reported as effectively zero.
pub const ZERO_FLAG_TOL: f64 = 1e-7;

/// Solver settings used by the projections unless overridden. Tighter than
/// the solver defaults because primal and dual values are compared at 1e-6.
pub fn projector_config() -> SolverConfig {
    SolverConfig {
        feas_tol: 1e-9,
        gap_tol: 1e-8,
        max_iter: 200,
    }
}

/// Factor on both tolerances within which a stalled solve still counts.
pub const NEAR_OPTIMAL_FACTOR: f64 = 10.0;

/// `Optimal`, or a stalled best iterate (`NumericalFailure`, `MaxIter`) whose
/// residuals and gap are within [`NEAR_OPTIMAL_FACTOR`] of the tolerances.
/// The certificate keeps the solver's own status.
pub fn accepted(sol: &SdpSolution, cfg: &SolverConfig) -> bool {
    match sol.status {
        SolveStatus::Optimal => true,
        SolveStatus::NumericalFailure | SolveStatus::MaxIter => {
            let f = NEAR_OPTIMAL_FACTOR;
            sol.primal_residual.max(sol.dual_residual) <= f * cfg.feas_tol && sol.gap <= f * cfg.gap_tol
        }
        _ => false,
    }
}

/// Projection of `f` onto `P_t(g) ∩ R[x]_{2d}` (or `Q_t`). With `t = d` this
/// is the projection onto the truncated cone itself.
#[derive(Clone, Debug)]
pub struct ProjectionProblem {
    pub f: Poly<f64>,
    pub system: SemialgebraicSystem<f64>,
    pub norm: WeightSequence,
    /// Half of the truncation degree `2d`.
    pub d: u32,
    /// Cone level `t ≥ d`.
    pub level: u32,
}

impl ProjectionProblem {
    pub fn new(f: Poly<f64>, system: SemialgebraicSystem<f64>, norm: NormKind, d: u32) -> Result<Self> {
        Self::truncated(f, system, norm, d, d)
    }

    pub fn truncated(
        f: Poly<f64>,
        system: SemialgebraicSystem<f64>,
        norm: NormKind,
        d: u32,
        level: u32,
    ) -> Result<Self> {
        if f.nvars() != system.nvars() {
            return Err(Error::DimensionMismatch {
                expected: system.nvars(),
                found: f.nvars(),
            });
        }
        if d == 0 {
            return Err(Error::Invalid("the degree d must be at least 1".into()));
        }
        if f.degree() > 2 * d {
            return Err(Error::Invalid(format!(
                "deg f = {} exceeds the truncation degree 2d = {}",
                f.degree(),
                2 * d
            )));
        }
        if level < d {
            return Err(Error::Invalid(format!("cone level t = {level} is below d = {d}")));
        }
        let norm = WeightSequence::new(norm);
        norm.weight_for_degree::<f64>(2 * d)?;
        Ok(ProjectionProblem {
            f,
            system,
            norm,
            d,
            level,
        })
    }

    pub fn nvars(&self) -> usize {
        self.system.nvars()
    }

    /// The polynomials `q_j` with `g_f = f + Σ_j λ_j q_j`.
    pub fn perturbation_basis(&self) -> Vec<(Perturbation, Poly<f64>)> {
        let n = self.nvars();
        let mut out = vec![(Perturbation::Constant, Poly::constant(n, 1.0))];
        let ks: Vec<u32> = match self.norm.kind() {
            NormKind::L1 => vec![self.d],
            NormKind::LW => (1..=self.d).collect(),
        };
        for var in 0..n {
            for &k in &ks {
                let scale = match self.norm.kind() {
                    NormKind::L1 => 1.0,
                    NormKind::LW => 1.0 / factorial(2 * k).expect("checked at construction"),
                };
                out.push((
                    Perturbation::Power { var, k },
                    Poly::monomial(Exponent::power(n, var, 2 * k), scale),
                ));
            }
        }
        out
    }
}

/// Label of one added term of a projection.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Perturbation {
    /// `λ_0 · 1`
    Constant,
    /// `λ_{ik} · x_i^{2k}/(2k)!` (`ℓw`) or `λ_i · x_i^{2d}` (`ℓ1`); `var` is
    /// 0-based.
    Power { var: usize, k: u32 },
    /// A per-monomial slack of the general formulation.
    Monomial(Exponent),
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perturbation::Constant => write!(f, "const"),
            Perturbation::Power { var, k } => write!(f, "x{} {k}", var + 1),
            Perturbation::Monomial(e) => write!(f, "mono {e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionCertificate {
    pub norm: NormKind,
    pub d: u32,
    pub level: u32,
    pub status: SolveStatus,
    pub lambda: Vec<(Perturbation, f64)>,
    pub grams: Vec<(BlockLabel, SymMatrix<f64>)>,
    pub p_value: f64,
    pub projection: Poly<f64>,
    pub dual_moments: Option<MomentSequence<f64>>,
}

impl ProjectionCertificate {
    /// `p ≤ 1e-7`: `f` is, up to solver accuracy, already in the cone.
    pub fn effectively_zero(&self) -> bool {
        self.p_value <= ZERO_FLAG_TOL
    }

    pub fn lambda_value(&self, key: &Perturbation) -> Option<f64> {
        self.lambda.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn max_power_lambda(&self) -> f64 {
        self.lambda
            .iter()
            .filter(|(k, _)| matches!(k, Perturbation::Power { .. }))
            .fold(0.0, |a, &(_, v)| a.max(v))
    }
}

/// Adds one PSD block per cone block and the equality rows
/// `Σ_J ⟨X_J, B^J_α⟩ (+ extra) = rhs_α` for every `α ∈ N^n_{2t}`. Returns the
/// block indices and the row of each exponent.
pub(crate) struct ConeRows {
    pub blocks: Vec<usize>,
    pub rows: crate::polyalg::MonomialIndex,
}

pub(crate) fn add_cone_rows(
    sdp: &mut SdpProblem,
    trunc: &ConeTruncation<f64>,
    rhs: impl Fn(&Exponent) -> f64,
) -> Result<ConeRows> {
    let rows = crate::polyalg::MonomialIndex::new(trunc.nvars(), trunc.degree())?;
    let first = sdp.num_constraints();
    for e in rows.basis() {
        sdp.add_constraint(rhs(e));
    }
    let mut blocks = Vec::new();
    for block in trunc.blocks() {
        let b = sdp.add_block(crate::sdpcore::BlockKind::Psd, block.side());
        for (alpha, m) in block.basis.iter() {
            let row = rows
                .position(alpha)
                .ok_or_else(|| Error::Invalid(format!("basis matrix for {alpha} exceeds the cone degree")))?;
            for &(i, j, v) in m.entries() {
                sdp.add_constraint_entry(first + row, b, i, j, v)?;
            }
        }
        blocks.push(b);
    }
    Ok(ConeRows { blocks, rows })
}
