//! Independent re-validation of a solution against the problem data, sharing
//! nothing with the solver beyond the returned matrices and vector.

use super::problem::{BlockKind, SdpProblem, Sense};
use super::solver::SdpSolution;
use crate::momentkit::SymMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateReport {
    /// `⟨A_i, X⟩ − b_i`
    pub constraint_residuals: Vec<f64>,
    pub max_constraint_residual: f64,
    /// Smallest eigenvalue of each block of `X`.
    pub primal_min_eig: Vec<f64>,
    /// Smallest eigenvalue of each block of the recomputed dual slack.
    pub dual_min_eig: Vec<f64>,
    /// Largest absolute off-diagonal entry of a diagonal block of `X`.
    pub diag_violation: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `primal − dual` in min form (nonnegative under weak duality).
    pub gap: f64,
}

fn dense(p: &SdpProblem, m: impl Iterator<Item = (usize, usize, usize, f64)>) -> Vec<SymMatrix<f64>> {
    let mut out: Vec<SymMatrix<f64>> = p.blocks().iter().map(|b| SymMatrix::zeros(b.side)).collect();
    for (b, i, j, v) in m {
        out[b].add_sym(i, j, v);
    }
    out
}

fn min_eig(p: &SdpProblem, b: usize, m: &SymMatrix<f64>) -> f64 {
    match p.blocks()[b].kind {
        BlockKind::Psd if m.side() > 0 => m.spectrum().min,
        BlockKind::NonnegDiag if m.side() > 0 => (0..m.side()).map(|i| m.get(i, i)).fold(f64::INFINITY, f64::min),
        _ => 0.0,
    }
}

pub fn check_certificate(p: &SdpProblem, sol: &SdpSolution) -> CertificateReport {
    let c = dense(p, p.objective().iter());
    let x = &sol.primal;
    let constraint_residuals: Vec<f64> = p
        .constraints()
        .iter()
        .map(|con| {
            let a = dense(p, con.coeffs.iter());
            a.iter().zip(x).map(|(a, x)| a.inner(x)).sum::<f64>() - con.rhs
        })
        .collect();
    // S = C − Σ y_i A_i (min) or Σ y_i A_i − C (max)
    let sign = match p.sense() {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let mut s: Vec<SymMatrix<f64>> = c.iter().map(|m| m.scale(sign)).collect();
    for (con, &y) in p.constraints().iter().zip(&sol.dual) {
        for (b, i, j, v) in con.coeffs.iter() {
            s[b].add_sym(i, j, -sign * y * v);
        }
    }
    let mut diag_violation: f64 = 0.0;
    for (b, spec) in p.blocks().iter().enumerate() {
        if spec.kind == BlockKind::NonnegDiag {
            for i in 0..spec.side {
                for j in 0..i {
                    diag_violation = diag_violation.max(x[b].get(i, j).abs());
                }
            }
        }
    }
    let primal_objective: f64 = c.iter().zip(x).map(|(c, x)| c.inner(x)).sum();
    let dual_objective: f64 = p.constraints().iter().zip(&sol.dual).map(|(c, y)| c.rhs * y).sum();
    CertificateReport {
        max_constraint_residual: constraint_residuals.iter().fold(0.0, |a, r| a.max(r.abs())),
        constraint_residuals,
        primal_min_eig: x.iter().enumerate().map(|(b, m)| min_eig(p, b, m)).collect(),
        dual_min_eig: s.iter().enumerate().map(|(b, m)| min_eig(p, b, m)).collect(),
        diag_violation,
        primal_objective,
        dual_objective,
        gap: sign * (primal_objective - dual_objective),
    }
}
