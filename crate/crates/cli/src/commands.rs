use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use psatz_core::certify::{
    membership, membership_sdp, necessity_check, psatz_search, MembershipVerdict, PsatzMode, PsatzOutcome,
    PsatzQuery,
};
use psatz_core::conemodel::{parse_system, SemialgebraicSystem};
use psatz_core::momentkit::{
    carleman_diagnostic, kmoment_condition_check, parse_moments, support_nonnegativity_test, KMomentVerdict,
    MomentSequence, SupportVerdict,
};
use psatz_core::polyalg::{format_polynomial, max_variable_index, parse_polynomial, NormKind, Poly};
use psatz_core::projector::{
    dual_moment_problem, dual_moment_sdp, format_certificate, general_form_sdp, lambda_form_sdp,
    project_general_form, project_lambda_form, projector_config, Perturbation, ProjectionCertificate,
    ProjectionProblem,
};
use psatz_core::sdpcore::{export_sdpa, SolveStatus, SolverConfig};

use crate::args::{CommonArgs, Form, ProblemArgs, Which};
use crate::config::{Format, RunConfig};
use crate::error::{CliError, EXIT_NOT_CERTIFIED, EXIT_NUMERICAL, EXIT_OK};

/// Half-width of the box that K is sampled from.
const SAMPLE_RADIUS: f64 = 2.0;

/// Motzkin-like test polynomial and the reference `(d, p_d, λ)` rows it is
/// checked against.
pub const MOTZKIN: &str = "x1^2*x2^2*(x1^2+x2^2-1)+1/27";
pub const MOTZKIN_REFERENCE: [(u32, f64, [f64; 3]); 3] = [
    (3, 1.6e-2, [5.445e-3, 5.367e-3, 5.367e-3]),
    (4, 2e-3, [2.4e-4, 9.36e-4, 9.36e-4]),
    (5, 8e-5, [0.04e-5, 4.34e-5, 4.34e-5]),
];

/// Output of a command: ordered fields, an optional certificate and the exit
/// code.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Vec<(String, String)>,
    pub certificate: Option<String>,
    /// Replaces the field listing in text mode.
    pub table: Option<String>,
    pub code: i32,
}

impl Report {
    fn field(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    /// `text`: aligned `key value` lines. `structured`: the certificate when
    /// there is one, otherwise `key=value` lines.
    pub fn render(&self, format: Format) -> String {
        match (format, &self.certificate) {
            (Format::Structured, Some(c)) => c.clone(),
            (Format::Structured, None) => {
                let mut s = String::new();
                for (k, v) in &self.fields {
                    let _ = writeln!(s, "{k}={v}");
                }
                s
            }
            (Format::Text, _) if self.table.is_some() => self.table.clone().unwrap_or_default(),
            (Format::Text, _) => {
                let w = self.fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut s = String::new();
                for (k, v) in &self.fields {
                    let _ = writeln!(s, "{k:<w$}  {v}");
                }
                s
            }
        }
    }

    /// The certificate when there is one, otherwise the rendering.
    pub fn file_contents(&self, format: Format) -> String {
        self.certificate.clone().unwrap_or_else(|| self.render(format))
    }
}

pub fn resolve(problem: Option<&ProblemArgs>, common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let mut flags = BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.insert(k.to_string(), v);
        }
    };
    if let Some(p) = problem {
        put("system", p.system.as_ref().map(|p| p.display().to_string()));
        put("f", p.f.clone());
        put("nvars", p.nvars.map(|v| v.to_string()));
        put("norm", p.norm.clone());
        put("cone", p.cone.clone());
        put("d", p.d.map(|v| v.to_string()));
        put("t", p.t.map(|v| v.to_string()));
    }
    put("format", common.format.clone());
    put("out", common.out.as_ref().map(|p| p.display().to_string()));
    put("feas_tol", common.feas_tol.map(|v| v.to_string()));
    put("gap_tol", common.gap_tol.map(|v| v.to_string()));
    put("max_iter", common.max_iter.map(|v| v.to_string()));
    put("seed", common.seed.map(|v| v.to_string()));
    cfg.apply(&flags)?;
    Ok(cfg)
}

pub fn solver_config(cfg: &RunConfig, base: SolverConfig) -> SolverConfig {
    SolverConfig {
        feas_tol: cfg.feas_tol.unwrap_or(base.feas_tol),
        gap_tol: cfg.gap_tol.unwrap_or(base.gap_tol),
        max_iter: cfg.max_iter.unwrap_or(base.max_iter),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn load_system(cfg: &RunConfig, fallback_nvars: usize) -> Result<SemialgebraicSystem<f64>, CliError> {
    let system = match &cfg.system {
        Some(p) => parse_system(&read(p)?)?,
        None => SemialgebraicSystem::unconstrained(cfg.nvars.unwrap_or(fallback_nvars).max(1)),
    };
    Ok(match cfg.cone {
        Some(k) => system.with_kind(k)?,
        None => system,
    })
}

fn load_problem(cfg: &RunConfig) -> Result<(Poly<f64>, SemialgebraicSystem<f64>), CliError> {
    let text = cfg.f.as_deref().ok_or_else(|| CliError::input("missing --f"))?;
    let system = load_system(cfg, max_variable_index(text)?)?;
    let f = parse_polynomial(text, system.nvars())?;
    Ok((f, system))
}

fn require_d(cfg: &RunConfig) -> Result<u32, CliError> {
    cfg.d.ok_or_else(|| CliError::input("missing --d"))
}

fn lambda_key(k: &Perturbation) -> String {
    match k {
        Perturbation::Constant => "lambda.const".into(),
        Perturbation::Power { var, k } => format!("lambda.x{}.{k}", var + 1),
        Perturbation::Monomial(e) => format!("lambda.{e}"),
    }
}

fn num(v: f64) -> String {
    format!("{v:.10e}")
}

pub fn project(cfg: &RunConfig, form: Form, check_dual: bool) -> Result<Report, CliError> {
    let (f, system) = load_problem(cfg)?;
    let d = require_d(cfg)?;
    let p = ProjectionProblem::truncated(f, system, cfg.norm, d, cfg.t.unwrap_or(d))?;
    let scfg = solver_config(cfg, projector_config());
    let mut cert = match form {
        Form::Lambda => project_lambda_form(&p, &scfg)?,
        Form::General => project_general_form(&p, &scfg)?,
    };
    let mut r = Report::default();
    r.field("norm", cert.norm);
    r.field("d", cert.d);
    r.field("level", cert.level);
    r.field("status", cert.status);
    r.field("p_value", num(cert.p_value));
    r.field("zero_flag", cert.effectively_zero());
    for (k, v) in &cert.lambda {
        if matches!(form, Form::Lambda) || v.abs() > 1e-12 {
            r.field(lambda_key(k), num(*v));
        }
    }
    r.field("projection", format_polynomial(&cert.projection));
    if check_dual {
        let dual = dual_moment_problem(&p, &scfg)?;
        r.field("dual_value", num(dual.value));
        r.field("primal_dual_gap", num((cert.p_value - dual.value).abs()));
        cert.dual_moments = Some(dual.moments);
    }
    r.certificate = Some(format_certificate(&cert, None));
    r.code = EXIT_OK;
    Ok(r)
}

fn membership_certificate(cfg: &RunConfig, f: &Poly<f64>, k: u32, v: &MembershipVerdict) -> ProjectionCertificate {
    let mut c = ProjectionCertificate {
        norm: cfg.norm,
        d: k,
        level: k,
        status: SolveStatus::NumericalFailure,
        lambda: Vec::new(),
        grams: Vec::new(),
        p_value: f64::NAN,
        projection: f.clone(),
        dual_moments: None,
    };
    match v {
        MembershipVerdict::InCone(g) => {
            c.status = SolveStatus::Optimal;
            c.grams = g.grams.clone();
            c.p_value = 0.0;
        }
        MembershipVerdict::NotInConeAtLevel(s) => {
            c.status = SolveStatus::Infeasible;
            c.dual_moments = Some(s.moments.clone());
        }
        MembershipVerdict::Inconclusive { status, .. } => c.status = *status,
    }
    c
}

fn verdict_code(v: &MembershipVerdict) -> i32 {
    match v {
        MembershipVerdict::InCone(_) => EXIT_OK,
        MembershipVerdict::NotInConeAtLevel(_) => EXIT_NOT_CERTIFIED,
        MembershipVerdict::Inconclusive { .. } => EXIT_NUMERICAL,
    }
}

pub fn certify(cfg: &RunConfig) -> Result<Report, CliError> {
    let (f, system) = load_problem(cfg)?;
    let k = cfg.d.unwrap_or_else(|| f.degree().div_ceil(2)).max(1);
    let v = membership(&f, &system, k, &solver_config(cfg, SolverConfig::default()))?;
    let mut r = Report::default();
    r.field("cone", system.kind());
    r.field("level", k);
    match &v {
        MembershipVerdict::InCone(c) => {
            r.field("verdict", "in-cone");
            r.field("reconstruction_error", num(c.reconstruction_error));
            r.field("min_eigenvalue", num(c.min_eigenvalue));
        }
        MembershipVerdict::NotInConeAtLevel(s) => {
            r.field("verdict", "not-in-cone");
            r.field("riesz_value", num(s.riesz_value));
            r.field("min_eigenvalue", num(s.min_eigenvalue));
        }
        MembershipVerdict::Inconclusive { status, reason } => {
            r.field("verdict", "inconclusive");
            r.field("status", status);
            r.field("reason", reason);
        }
    }
    let cert = membership_certificate(cfg, &f, k, &v);
    r.certificate = Some(format_certificate(&cert, Some(&v.to_string())));
    r.code = verdict_code(&v);
    Ok(r)
}

pub fn psatz(cfg: &RunConfig) -> Result<Report, CliError> {
    let (f, system) = load_problem(cfg)?;
    let q = PsatzQuery::new(f, system, cfg.eps, cfg.dmax, cfg.mode)?;
    let (outcome, steps) = psatz_search(&q, &solver_config(cfg, SolverConfig::default()))?;
    let mut r = Report::default();
    r.field("mode", q.mode);
    r.field("eps", q.epsilon);
    r.field("dmax", q.d_max);
    for s in &steps {
        r.field(format!("step.d{}.level{}", s.d, s.level), &s.verdict);
    }
    r.field("outcome", &outcome);
    match &outcome {
        PsatzOutcome::CertifiedAt {
            d,
            level,
            perturbed,
            certificate,
        } => {
            let check = necessity_check(perturbed, &q.system, cfg.samples, SAMPLE_RADIUS, cfg.seed);
            r.field("necessity.samples", check.samples);
            r.field("necessity.min_value", num(check.min_value));
            r.field("necessity.holds", check.holds());
            let n = q.f.nvars();
            let (norm, powers): (NormKind, Vec<u32>) = match q.mode {
                PsatzMode::Weighted => (NormKind::LW, (1..=*d).collect()),
                PsatzMode::Power => (NormKind::L1, vec![*d]),
            };
            let mut lambda = vec![(Perturbation::Constant, q.epsilon)];
            for var in 0..n {
                for &k in &powers {
                    lambda.push((Perturbation::Power { var, k }, q.epsilon));
                }
            }
            let cert = ProjectionCertificate {
                norm,
                d: *d,
                level: *level,
                status: SolveStatus::Optimal,
                p_value: lambda.iter().map(|(_, v)| v).sum(),
                lambda,
                grams: certificate.grams.clone(),
                projection: perturbed.clone(),
                dual_moments: None,
            };
            r.certificate = Some(format_certificate(&cert, Some(&outcome.to_string())));
            r.code = EXIT_OK;
        }
        PsatzOutcome::NotFoundUpTo(_) => r.code = EXIT_NOT_CERTIFIED,
    }
    Ok(r)
}

pub fn moments_check(
    cfg: &RunConfig,
    moments: &Path,
    d: Option<u32>,
    f: Option<&str>,
    carleman: Option<u32>,
) -> Result<Report, CliError> {
    let y: MomentSequence<f64> = parse_moments(&read(moments)?)?;
    let system = load_system(cfg, y.nvars())?;
    let d = d.unwrap_or(y.max_degree() / 2);
    let mut r = Report::default();
    let mut ok = true;
    r.field("nvars", y.nvars());
    r.field("degree", y.max_degree());
    if let Err(e) = y.check_measure_claim() {
        ok = false;
        r.field("measure_claim", e);
    }
    let report = kmoment_condition_check(&y, &system, d)?;
    for c in &report.checks {
        let value = match (&c.order, &c.spectrum) {
            (Some(o), Some(s)) => format!("order {o} min-eig {} psd {}", num(s.min), c.is_psd()),
            _ => "skipped".into(),
        };
        r.field(format!("localizing.g{}", c.generator), value);
    }
    r.field("dual_norm_bound", num(report.dual_norm_bound));
    match report.verdict {
        KMomentVerdict::NecessaryConditionsHold => r.field("kmoment", "necessary-conditions-hold"),
        KMomentVerdict::Violated {
            generator,
            order,
            min_eigenvalue,
        } => {
            ok = false;
            r.field("kmoment", format!("violated g{generator} order {order} min-eig {}", num(min_eigenvalue)));
        }
    }
    if let Some(text) = f {
        let f = parse_polynomial(text, y.nvars())?;
        let order = (y.max_degree().saturating_sub(f.degree())) / 2;
        match support_nonnegativity_test(&y, &f, order.min(d))? {
            SupportVerdict::ConsistentUpTo(k) => r.field("support", format!("consistent-up-to {k}")),
            SupportVerdict::Violated { order, min_eigenvalue } => {
                ok = false;
                r.field("support", format!("violated order {order} min-eig {}", num(min_eigenvalue)));
            }
        }
    }
    if let Some(terms) = carleman {
        for s in carleman_diagnostic(&y, None, terms)? {
            let i = s.variable + 1;
            r.field(format!("carleman.x{i}.partial_sum"), num(s.partial_sum()));
            r.field(format!("carleman.x{i}.monotone"), s.is_monotone());
            r.field(format!("carleman.x{i}.flagged"), s.flagged());
            r.field(format!("carleman.x{i}.moment_bound"), num(s.moment_bound));
        }
    }
    r.code = if ok { EXIT_OK } else { EXIT_NOT_CERTIFIED };
    Ok(r)
}

pub fn export(cfg: &RunConfig, which: Which) -> Result<String, CliError> {
    let (f, system) = load_problem(cfg)?;
    let sdp = match which {
        Which::Membership => {
            let k = cfg.d.unwrap_or_else(|| f.degree().div_ceil(2)).max(1);
            membership_sdp(&f, &system, k)?
        }
        other => {
            let d = require_d(cfg)?;
            let p = ProjectionProblem::truncated(f, system, cfg.norm, d, cfg.t.unwrap_or(d))?;
            match other {
                Which::Lambda => lambda_form_sdp(&p)?,
                Which::General => general_form_sdp(&p)?,
                _ => dual_moment_sdp(&p)?,
            }
        }
    };
    Ok(export_sdpa(&sdp))
}

pub fn repro_motzkin(cfg: &RunConfig) -> Result<Report, CliError> {
    let f: Poly<f64> = parse_polynomial(MOTZKIN, 2)?;
    let system = SemialgebraicSystem::unconstrained(2);
    let scfg = solver_config(cfg, projector_config());
    let mut r = Report::default();
    let mut table = String::from(" d   lambda0      lambda1      lambda2      p_d          reference  status\n");
    for (d, reference, ref_lambda) in MOTZKIN_REFERENCE {
        let p = ProjectionProblem::new(f.clone(), system.clone(), NormKind::L1, d)?;
        let c = project_lambda_form(&p, &scfg)?;
        let l = |k: &Perturbation| c.lambda_value(k).unwrap_or(f64::NAN);
        let (l0, l1, l2) = (
            l(&Perturbation::Constant),
            l(&Perturbation::Power { var: 0, k: d }),
            l(&Perturbation::Power { var: 1, k: d }),
        );
        let p_ok = (c.p_value - reference).abs() <= 0.15 * reference;
        let sym = (l1 + l2) / 2.0;
        let sym_ok = (l1 - l2).abs() <= 1e-2 * sym.abs().max(f64::MIN_POSITIVE);
        let status = if p_ok && sym_ok { "pass" } else { "fail" };
        let _ = writeln!(
            table,
            "{d:>2}   {l0:.4e}   {l1:.4e}   {l2:.4e}   {:.4e}   {reference:.1e}    {status}",
            c.p_value
        );
        r.field(format!("d{d}.lambda"), format!("{} {} {}", num(l0), num(l1), num(l2)));
        r.field(format!("d{d}.p_value"), num(c.p_value));
        r.field(format!("d{d}.reference"), reference);
        r.field(
            format!("d{d}.reference_lambda"),
            format!("{} {} {}", ref_lambda[0], ref_lambda[1], ref_lambda[2]),
        );
        r.field(format!("d{d}.status"), status);
    }
    r.table = Some(table);
    r.code = EXIT_OK;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_fields_roundtrip() {
        let mut r = Report::default();
        r.field("p_value", num(0.5));
        r.field("projection", "x1^2 + 1");
        let text = r.render(Format::Structured);
        let back: Vec<(String, String)> = text
            .lines()
            .map(|l| {
                let (k, v) = l.split_once('=').unwrap();
                (k.to_string(), v.to_string())
            })
            .collect();
        assert_eq!(back, r.fields);
    }

    #[test]
    fn certificate_wins_in_structured_mode() {
        let r = Report {
            fields: vec![("a".into(), "1".into())],
            certificate: Some("CERTIFICATE\nEND\n".into()),
            ..Default::default()
        };
        assert_eq!(r.render(Format::Structured), "CERTIFICATE\nEND\n");
        assert_eq!(r.render(Format::Text), "a  1\n");
    }
}
