use std::fmt;

use super::{membership, GramCertificate, MembershipVerdict};
use crate::conemodel::SemialgebraicSystem;
use crate::error::{Error, Result};
use crate::polyalg::{factorial, Exponent, Poly};
use crate::sdpcore::SolverConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PsatzMode {
    /// Perturbation `1 + Σ_i Σ_{k≤d} x_i^{2k}/(2k)!` at level `max(⌈deg f/2⌉, d)`.
    #[default]
    Weighted,
    /// Perturbation `1 + Σ_i x_i^{2d}`, with levels `t = d..d_max` tried in turn.
    Power,
}

impl std::str::FromStr for PsatzMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "weighted" => Ok(PsatzMode::Weighted),
            "power" => Ok(PsatzMode::Power),
            other => Err(Error::Invalid(format!("unknown search mode `{other}` (expected weighted or power)"))),
        }
    }
}

impl fmt::Display for PsatzMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PsatzMode::Weighted => "weighted",
            PsatzMode::Power => "power",
        })
    }
}

/// The perturbation polynomial `q_d` of `mode` in `nvars` variables.
pub fn perturbation(nvars: usize, mode: PsatzMode, d: u32) -> Result<Poly<f64>> {
    let mut terms = vec![(Exponent::zero(nvars), 1.0)];
    for var in 0..nvars {
        match mode {
            PsatzMode::Weighted => {
                for k in 1..=d {
                    let w = factorial(2 * k).ok_or(Error::WeightOverflow { degree: 2 * k })?;
                    terms.push((Exponent::power(nvars, var, 2 * k), 1.0 / w));
                }
            }
            PsatzMode::Power => terms.push((Exponent::power(nvars, var, 2 * d), 1.0)),
        }
    }
    Poly::from_terms(nvars, terms)
}

#[derive(Clone, Debug)]
pub struct PsatzQuery {
    pub f: Poly<f64>,
    pub system: SemialgebraicSystem<f64>,
    pub epsilon: f64,
    pub d_max: u32,
    pub mode: PsatzMode,
}

impl PsatzQuery {
    pub fn new(
        f: Poly<f64>,
        system: SemialgebraicSystem<f64>,
        epsilon: f64,
        d_max: u32,
        mode: PsatzMode,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        if d_max == 0 {
            return Err(Error::Invalid("d_max must be at least 1".into()));
        }
        if f.nvars() != system.nvars() {
            return Err(Error::DimensionMismatch {
                expected: system.nvars(),
                found: f.nvars(),
            });
        }
        Ok(PsatzQuery {
            f,
            system,
            epsilon,
            d_max,
            mode,
        })
    }

    /// `f + ε q_d`.
    pub fn perturbed(&self, d: u32) -> Result<Poly<f64>> {
        let q = perturbation(self.f.nvars(), self.mode, d)?;
        self.f.add(&q.scale(&self.epsilon))
    }

    fn base_level(&self) -> u32 {
        self.f.degree().div_ceil(2)
    }
}

/// One membership test of the search.
#[derive(Clone, Debug, PartialEq)]
pub struct PsatzStep {
    pub d: u32,
    pub level: u32,
    pub verdict: MembershipVerdict,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsatzOutcome {
    CertifiedAt {
        d: u32,
        level: u32,
        perturbed: Poly<f64>,
        certificate: GramCertificate,
    },
    NotFoundUpTo(u32),
}

impl fmt::Display for PsatzOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsatzOutcome::CertifiedAt { d, level, .. } => write!(f, "certified-at d {d} level {level}"),
            PsatzOutcome::NotFoundUpTo(d) => write!(f, "not-found-up-to {d}"),
        }
    }
}

/// Searches `d = 1..d_max` for `f + ε q_d` in the truncated cone and stops at
/// the first certificate. Every membership test is recorded in the returned
/// steps, including inconclusive ones.
pub fn psatz_search(q: &PsatzQuery, cfg: &SolverConfig) -> Result<(PsatzOutcome, Vec<PsatzStep>)> {
    let mut steps = Vec::new();
    for d in 1..=q.d_max {
        let g = q.perturbed(d)?;
        let levels = match q.mode {
            PsatzMode::Weighted => {
                let k = q.base_level().max(d);
                k..=k
            }
            PsatzMode::Power => q.base_level().max(d)..=q.d_max.max(q.base_level().max(d)),
        };
        for level in levels {
            let verdict = membership(&g, &q.system, level, cfg)?;
            let done = match &verdict {
                MembershipVerdict::InCone(c) => Some(c.clone()),
                _ => None,
            };
            steps.push(PsatzStep { d, level, verdict });
            if let Some(certificate) = done {
                return Ok((
                    PsatzOutcome::CertifiedAt {
                        d,
                        level,
                        perturbed: g,
                        certificate,
                    },
                    steps,
                ));
            }
        }
    }
    Ok((PsatzOutcome::NotFoundUpTo(q.d_max), steps))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureEpsRow {
    pub epsilon: f64,
    /// Smallest `t ≤ t_max` with `f + ε(1 + Σ_i x_i^{2d}) ∈ P_t(g)`.
    pub minimal_t: Option<u32>,
    /// Levels whose membership test was inconclusive.
    pub inconclusive: Vec<u32>,
}

/// For each `ε` (positive, decreasing) the smallest level certifying
/// `f + ε(1 + Σ_i x_i^{2d})`. A finite table only samples the closure
/// condition; it cannot confirm it for every `ε`.
pub fn seq_closure_probe(
    f: &Poly<f64>,
    system: &SemialgebraicSystem<f64>,
    d: u32,
    eps: &[f64],
    t_max: u32,
    cfg: &SolverConfig,
) -> Result<Vec<ClosureEpsRow>> {
    if eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::Invalid("every epsilon must be positive".into()));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("epsilons must be strictly decreasing".into()));
    }
    let start = d.max(f.degree().div_ceil(2)).max(1);
    let mut rows = Vec::new();
    for &e in eps {
        let q = PsatzQuery::new(f.clone(), system.clone(), e, d.max(1), PsatzMode::Power)?;
        let g = q.perturbed(d)?;
        let mut row = ClosureEpsRow {
            epsilon: e,
            minimal_t: None,
            inconclusive: Vec::new(),
        };
        for t in start..=t_max {
            match membership(&g, system, t, cfg)? {
                MembershipVerdict::InCone(_) => {
                    row.minimal_t = Some(t);
                    break;
                }
                MembershipVerdict::Inconclusive { .. } => row.inconclusive.push(t),
                MembershipVerdict::NotInConeAtLevel(_) => {}
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
