use std::path::Path;
use std::process::{Command, Output};

use psatz_core::momentkit::{format_moments, MomentSequence};
use psatz_core::projector::parse_certificate;
use psatz_core::sdpcore::parse_sdpa;

const MOTZKIN: &str = "x1^2*x2^2*(x1^2+x2^2-1)+1/27";

fn psatz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psatz")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"))
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn project_motzkin_structured_roundtrips() {
    let o = psatz(&["project", "--f", MOTZKIN, "--norm", "l1", "--d", "3", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let c = parse_certificate(&stdout(&o), 2).unwrap().certificate;
    assert!((c.p_value - 1.6e-2).abs() < 0.15 * 1.6e-2);
    assert_eq!(c.lambda.len(), 3);
}

#[test]
fn project_trivial_inputs() {
    for args in [
        vec!["project", "--f", "0", "--d", "1", "--format", "structured"],
        vec!["project", "--f", "x1^2", "--d", "1", "--norm", "lw", "--format", "structured"],
    ] {
        let o = psatz(&args);
        assert_eq!(o.status.code(), Some(0));
        let c = parse_certificate(&stdout(&o), 1).unwrap();
        assert!(c.zero_flag, "{}", stdout(&o));
    }
}

#[test]
fn project_writes_certificate_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.txt");
    let o = psatz(&["project", "--f", "x1^4 - x1", "--d", "2", "--check-dual", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("primal_dual_gap"));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(parse_certificate(&text, 1).is_ok());
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(psatz(&["project", "--f", "x1^", "--d", "1"]).status.code(), Some(1));
    assert_eq!(psatz(&["project", "--f", "x1", "--d", "1", "--system", "/nonexistent/k.sys"]).status.code(), Some(1));
    assert_eq!(psatz(&["project", "--f", "x1^6", "--d", "1"]).status.code(), Some(1));
    assert_eq!(psatz(&["project", "--f", "x1"]).status.code(), Some(1));
    assert_eq!(psatz(&["project", "--f", "x1", "--d", "1", "--gap-tol", "-1"]).status.code(), Some(1));
}

#[test]
fn certify_exit_codes() {
    let o = psatz(&["certify", "--f", "(1 + x1 + x2)^2", "--d", "1", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let c = parse_certificate(&stdout(&o), 2).unwrap();
    assert!(c.verdict.unwrap().starts_with("in-cone"));
    assert_eq!(c.certificate.grams.len(), 1);

    let o = psatz(&["certify", "--f", MOTZKIN, "--d", "3", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(3));
    let c = parse_certificate(&stdout(&o), 2).unwrap();
    assert!(c.verdict.unwrap().starts_with("not-in-cone"));
    let y = c.certificate.dual_moments.unwrap();
    let lf = psatz_core::momentkit::riesz(&y, &psatz_core::polyalg::parse_polynomial(MOTZKIN, 2).unwrap()).unwrap();
    assert!(lf < -1e-6);
}

#[test]
fn psatz_negative_on_interval_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(dir.path(), "interval.sys", "n 1\ncone preorder\ng: x1\ng: 1 - x1\n");
    let o = psatz(&["psatz", "--f", "-1", "--system", &sys, "--eps", "0.1", "--dmax", "4", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(field(&stdout(&o), "outcome"), "not-found-up-to 4");
}

#[test]
fn psatz_positive_constant_certified() {
    let o = psatz(&["psatz", "--f", "1", "--nvars", "2", "--eps", "0.5", "--dmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certified-at d 1"));
}

#[test]
fn moments_check_dirac_outside_disk() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(dir.path(), "disk.sys", "n 2\ng: 1 - x1^2 - x2^2\n");
    let inside = MomentSequence::from_atoms(2, 4, &[(1.0, vec![0.3, -0.2])]).unwrap();
    let outside = MomentSequence::from_atoms(2, 4, &[(1.0, vec![2.0, 0.0])]).unwrap();
    let yin = write(dir.path(), "in.mom", &format_moments(&inside));
    let yout = write(dir.path(), "out.mom", &format_moments(&outside));

    let o = psatz(&["moments-check", "--moments", &yin, "--system", &sys, "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(field(&stdout(&o), "kmoment"), "necessary-conditions-hold");

    let o = psatz(&["moments-check", "--moments", &yout, "--system", &sys, "--format", "structured"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(field(&stdout(&o), "kmoment").starts_with("violated g1"));
}

#[test]
fn moments_check_support_and_carleman() {
    let dir = tempfile::tempdir().unwrap();
    let y = MomentSequence::from_atoms(1, 8, &[(0.5, vec![-1.0]), (0.5, vec![1.0])]).unwrap();
    let path = write(dir.path(), "two.mom", &format_moments(&y));
    let o = psatz(&["moments-check", "--moments", &path, "--f", "x1^2", "--carleman", "4", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(field(&out, "support").starts_with("consistent-up-to"));
    assert_eq!(field(&out, "carleman.x1.monotone"), "true");

    let o = psatz(&["moments-check", "--moments", &path, "--f", "-x1^2", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn export_sdpa_is_deterministic_and_parses() {
    for kind in ["lambda", "general", "dual", "membership"] {
        let args = ["export-sdpa", "--f", MOTZKIN, "--norm", "l1", "--d", "3", "--problem-kind", kind];
        let a = psatz(&args);
        let b = psatz(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        assert!(parse_sdpa(&stdout(&a)).is_ok(), "{kind}");
    }
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "# defaults\nnorm = l1\nd = 2\nformat = structured\n");
    let o = psatz(&["project", "--f", MOTZKIN, "--config", &cfg, "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let c = parse_certificate(&stdout(&o), 2).unwrap().certificate;
    assert_eq!(c.d, 3);
    assert_eq!(c.norm, psatz_core::polyalg::NormKind::L1);

    let bad = write(dir.path(), "bad.cfg", "colour = blue\n");
    assert_eq!(psatz(&["project", "--f", "x1", "--d", "1", "--config", &bad]).status.code(), Some(1));
}

#[test]
fn repro_motzkin_passes() {
    let o = psatz(&["repro-motzkin", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for d in 3..=5 {
        assert_eq!(field(&out, &format!("d{d}.status")), "pass");
    }
    let text = stdout(&psatz(&["repro-motzkin"]));
    assert_eq!(text.lines().filter(|l| l.ends_with("pass")).count(), 3);
}
