//! Line-oriented certificate format:
//!
//! ```text
//! CERTIFICATE
//! NORM l1
//! D 3
//! LEVEL 3
//! STATUS optimal
//! LAMBDA <count>
//! const <value>
//! x<i> <k> <value>
//! mono (<α>) <value>
//! GRAMS <count>
//! BLOCK {<J>} <side>
//! <side rows of side values>
//! P_VALUE <value>
//! ZERO_FLAG true|false
//! PROJECTION
//! <polynomial>
//! MOMENTS <count> <2t>  (optional)
//! (<α>) <value>
//! VERDICT <text>        (optional)
//! END
//! ```
//!
//! Floats are written with 17 significant digits.

use std::fmt::Write;

use super::{Perturbation, ProjectionCertificate};
use crate::conemodel::BlockLabel;
use crate::error::{Error, Result};
use crate::momentkit::{MomentSequence, SymMatrix};
use crate::polyalg::{format_polynomial, parse_polynomial, Exponent, MonomialIndex, NormKind};
use crate::sdpcore::SolveStatus;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_certificate(c: &ProjectionCertificate, verdict: Option<&str>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "CERTIFICATE");
    let _ = writeln!(out, "NORM {}", c.norm);
    let _ = writeln!(out, "D {}", c.d);
    let _ = writeln!(out, "LEVEL {}", c.level);
    let _ = writeln!(out, "STATUS {}", c.status);
    let _ = writeln!(out, "LAMBDA {}", c.lambda.len());
    for (k, v) in &c.lambda {
        let _ = writeln!(out, "{k} {}", num(*v));
    }
    let _ = writeln!(out, "GRAMS {}", c.grams.len());
    for (label, m) in &c.grams {
        let _ = writeln!(out, "BLOCK {label} {}", m.side());
        for i in 0..m.side() {
            let row: Vec<String> = (0..m.side()).map(|j| num(m.get(i, j))).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    let _ = writeln!(out, "P_VALUE {}", num(c.p_value));
    let _ = writeln!(out, "ZERO_FLAG {}", c.effectively_zero());
    let _ = writeln!(out, "PROJECTION");
    let _ = writeln!(out, "{}", format_polynomial(&c.projection));
    if let Some(y) = &c.dual_moments {
        let _ = writeln!(out, "MOMENTS {} {}", y.values().len(), y.max_degree());
        for (e, v) in y.iter() {
            let _ = writeln!(out, "{e} {}", num(v));
        }
    }
    if let Some(v) = verdict {
        let _ = writeln!(out, "VERDICT {}", v.replace('\n', " "));
    }
    let _ = writeln!(out, "END");
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCertificate {
    pub certificate: ProjectionCertificate,
    pub zero_flag: bool,
    pub verdict: Option<String>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        let (i, l) = self.inner.next().ok_or_else(|| Error::format(self.line + 1, "unexpected end of certificate"))?;
        self.line = i + 1;
        Ok(l.trim())
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let l = self.next()?;
        l.strip_prefix(key)
            .and_then(|r| if key.ends_with(' ') || r.is_empty() { Some(r.trim()) } else { None })
            .ok_or_else(|| self.err(format!("expected `{}`", key.trim())))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::format(self.line, msg)
    }
}

fn parse_f64(l: &Lines, t: &str) -> Result<f64> {
    t.parse().map_err(|_| l.err(format!("malformed number `{t}`")))
}

fn parse_status(s: &str) -> Option<SolveStatus> {
    Some(match s {
        "optimal" => SolveStatus::Optimal,
        "infeasible" => SolveStatus::Infeasible,
        "unbounded" => SolveStatus::Unbounded,
        "max-iter" => SolveStatus::MaxIter,
        "numerical-failure" => SolveStatus::NumericalFailure,
        _ => return None,
    })
}

pub fn parse_certificate(text: &str, nvars: usize) -> Result<ParsedCertificate> {
    let mut l = Lines {
        inner: text.lines().enumerate(),
        line: 0,
    };
    l.keyed("CERTIFICATE")?;
    let norm: NormKind = l.keyed("NORM ")?.parse()?;
    let d: u32 = l.keyed("D ")?.parse().map_err(|_| l.err("malformed D"))?;
    let level: u32 = l.keyed("LEVEL ")?.parse().map_err(|_| l.err("malformed LEVEL"))?;
    let s = l.keyed("STATUS ")?;
    let status = parse_status(s).ok_or_else(|| l.err(format!("unknown status `{s}`")))?;
    let count: usize = l.keyed("LAMBDA ")?.parse().map_err(|_| l.err("malformed LAMBDA count"))?;
    let mut lambda = Vec::with_capacity(count);
    for _ in 0..count {
        let tok: Vec<&str> = l.next()?.split_whitespace().collect();
        let entry = match tok.as_slice() {
            ["const", v] => (Perturbation::Constant, parse_f64(&l, v)?),
            ["mono", e, v] => (Perturbation::Monomial(parse_exponent(&l, e)?), parse_f64(&l, v)?),
            [x, k, v] if x.starts_with('x') => {
                let var: usize = x[1..].parse().map_err(|_| l.err("malformed variable"))?;
                let k: u32 = k.parse().map_err(|_| l.err("malformed power"))?;
                if var == 0 {
                    return Err(l.err("variables are numbered from 1"));
                }
                (Perturbation::Power { var: var - 1, k }, parse_f64(&l, v)?)
            }
            _ => return Err(l.err("malformed LAMBDA entry")),
        };
        lambda.push(entry);
    }
    let count: usize = l.keyed("GRAMS ")?.parse().map_err(|_| l.err("malformed GRAMS count"))?;
    let mut grams = Vec::with_capacity(count);
    for _ in 0..count {
        let rest = l.keyed("BLOCK ")?;
        let (label, side) = rest.rsplit_once(' ').ok_or_else(|| l.err("malformed BLOCK line"))?;
        let label: BlockLabel = label.parse()?;
        let side: usize = side.parse().map_err(|_| l.err("malformed block side"))?;
        let mut vals = Vec::with_capacity(side * side);
        for _ in 0..side {
            let row = l.next()?;
            let before = vals.len();
            for t in row.split_whitespace() {
                vals.push(parse_f64(&l, t)?);
            }
            if vals.len() - before != side {
                return Err(l.err("wrong row length"));
            }
        }
        let m = SymMatrix::from_upper(side, |i, j| vals[i * side + j]);
        grams.push((label, m));
    }
    let pv = l.keyed("P_VALUE ")?;
    let p_value = parse_f64(&l, pv)?;
    let zero_flag = match l.keyed("ZERO_FLAG ")? {
        "true" => true,
        "false" => false,
        _ => return Err(l.err("ZERO_FLAG must be true or false")),
    };
    l.keyed("PROJECTION")?;
    let poly_line = l.next()?;
    let projection = parse_polynomial(poly_line, nvars).map_err(|e| l.err(e.to_string()))?;
    let mut verdict = None;
    let mut dual_moments = None;
    let mut next = l.next()?;
    if let Some(rest) = next.strip_prefix("MOMENTS ") {
        let (count, degree) = rest.split_once(' ').ok_or_else(|| l.err("malformed MOMENTS line"))?;
        let count: usize = count.parse().map_err(|_| l.err("malformed MOMENTS count"))?;
        let degree: u32 = degree.trim().parse().map_err(|_| l.err("malformed MOMENTS degree"))?;
        let index = MonomialIndex::new(nvars, degree)?;
        if index.len() != count {
            return Err(l.err(format!("MOMENTS count {count} does not match degree {degree}")));
        }
        let mut values = Vec::with_capacity(count);
        for expected in index.basis() {
            let (e, v) = l.next()?.split_once(' ').ok_or_else(|| l.err("malformed moment line"))?;
            if &parse_exponent(&l, e)? != expected {
                return Err(l.err(format!("expected moment {expected}")));
            }
            values.push(parse_f64(&l, v.trim())?);
        }
        dual_moments = Some(MomentSequence::from_values(nvars, degree, values)?);
        next = l.next()?;
    }
    if let Some(v) = next.strip_prefix("VERDICT ") {
        verdict = Some(v.to_string());
        next = l.next()?;
    }
    if next != "END" {
        return Err(l.err("expected `END`"));
    }
    Ok(ParsedCertificate {
        certificate: ProjectionCertificate {
            norm,
            d,
            level,
            status,
            lambda,
            grams,
            p_value,
            projection,
            dual_moments,
        },
        zero_flag,
        verdict,
    })
}

fn parse_exponent(l: &Lines, t: &str) -> Result<Exponent> {
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| l.err(format!("malformed exponent `{t}`")))?;
    let entries = inner
        .split(',')
        .map(|a| a.parse::<u32>().map_err(|_| l.err(format!("malformed exponent `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Exponent::new(entries))
}
