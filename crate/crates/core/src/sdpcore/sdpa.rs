//! SDPA sparse format (`.dat-s`). The file describes
//! `max ⟨F0, Y⟩ s.t. ⟨F_i, Y⟩ = c_i, Y ⪰ 0`; a min problem is written with
//! `F0 = −C` and a `"sense=min` comment so that parsing restores it exactly.

use std::fmt::Write;

use super::problem::{BlockKind, BlockSparse, BlockSpec, Constraint, SdpProblem, Sense};
use crate::error::{Error, Result};

const SENSE_TAG: &str = "sense=";

/// Negative zero is written as `0`.
fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Byte-stable export: entries sorted by `(matrix, block, i, j)`, upper
/// triangle, 1-based, zeros omitted, 17 significant digits.
pub fn export_sdpa(p: &SdpProblem) -> String {
    let mut out = String::new();
    let sense = match p.sense() {
        Sense::Min => "min",
        Sense::Max => "max",
    };
    let _ = writeln!(out, "\"{SENSE_TAG}{sense}");
    for c in p.comments() {
        let _ = writeln!(out, "\"{}", c.replace('\n', " "));
    }
    let _ = writeln!(out, "{}", p.num_constraints());
    let _ = writeln!(out, "{}", p.blocks().len());
    let sizes: Vec<String> = p
        .blocks()
        .iter()
        .map(|b| match b.kind {
            BlockKind::Psd => b.side.to_string(),
            BlockKind::NonnegDiag => format!("-{}", b.side),
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = p.constraints().iter().map(|c| num(c.rhs)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));
    let f0_sign = match p.sense() {
        Sense::Min => -1.0,
        Sense::Max => 1.0,
    };
    for (b, i, j, v) in p.objective().iter() {
        let _ = writeln!(out, "0 {} {} {} {}", b + 1, i + 1, j + 1, num(f0_sign * v));
    }
    for (k, c) in p.constraints().iter().enumerate() {
        for (b, i, j, v) in c.coeffs.iter() {
            let _ = writeln!(out, "{} {} {} {} {}", k + 1, b + 1, i + 1, j + 1, num(v));
        }
    }
    out
}

/// Parses `.dat-s` text. Without a `"sense=` comment the file is read in its
/// native max form.
pub fn parse_sdpa(text: &str) -> Result<SdpProblem> {
    let mut sense = Sense::Max;
    let mut comments = Vec::new();
    let mut body = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(c) = line.strip_prefix('"') {
            match c.strip_prefix(SENSE_TAG) {
                Some("min") => sense = Sense::Min,
                Some("max") => sense = Sense::Max,
                Some(other) => return Err(Error::format(k + 1, format!("unknown sense `{other}`"))),
                None => comments.push(c.to_string()),
            }
        } else if line.starts_with('*') || line.is_empty() {
            continue;
        } else {
            body.push((k + 1, line));
        }
    }
    let clean = |s: &str| s.replace([',', '(', ')', '{', '}'], " ");
    let mut lines = body.into_iter();
    let mut header = |what: &str| {
        lines
            .next()
            .map(|(n, l)| (n, clean(l)))
            .ok_or_else(|| Error::format(0, format!("missing {what}")))
    };
    let (n, l) = header("constraint count")?;
    let m: usize = first_token(&l).parse().map_err(|_| Error::format(n, "malformed constraint count"))?;
    let (n, l) = header("block count")?;
    let nb: usize = first_token(&l).parse().map_err(|_| Error::format(n, "malformed block count"))?;
    let (n, l) = header("block sizes")?;
    let blocks = l
        .split_whitespace()
        .take(nb)
        .map(|t| {
            let v: i64 = t.parse().map_err(|_| Error::format(n, format!("malformed block size `{t}`")))?;
            Ok(BlockSpec {
                side: v.unsigned_abs() as usize,
                kind: if v < 0 { BlockKind::NonnegDiag } else { BlockKind::Psd },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if blocks.len() != nb {
        return Err(Error::format(n, "too few block sizes"));
    }
    let (n, l) = header("right-hand side")?;
    let rhs = l
        .split_whitespace()
        .take(m)
        .map(|t| t.parse::<f64>().map_err(|_| Error::format(n, format!("malformed value `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if rhs.len() != m {
        return Err(Error::format(n, "too few right-hand side values"));
    }
    let f0_sign = match sense {
        Sense::Min => -1.0,
        Sense::Max => 1.0,
    };
    let mut objective = BlockSparse::new();
    let mut constraints: Vec<Constraint> = rhs
        .into_iter()
        .map(|rhs| Constraint {
            coeffs: BlockSparse::new(),
            rhs,
        })
        .collect();
    for (n, l) in lines {
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 5 {
            return Err(Error::format(n, "expected `matrix block i j value`"));
        }
        let idx = |t: &str| t.parse::<usize>().map_err(|_| Error::format(n, format!("malformed index `{t}`")));
        let (k, b, i, j) = (idx(tok[0])?, idx(tok[1])?, idx(tok[2])?, idx(tok[3])?);
        let v: f64 = tok[4].parse().map_err(|_| Error::format(n, format!("malformed value `{}`", tok[4])))?;
        if b == 0 || i == 0 || j == 0 || b > nb || k > m {
            return Err(Error::format(n, "index out of range"));
        }
        if k == 0 {
            objective.add(b - 1, i - 1, j - 1, f0_sign * v);
        } else {
            constraints[k - 1].coeffs.add(b - 1, i - 1, j - 1, v);
        }
    }
    SdpProblem::from_parts(blocks, constraints, objective, sense, comments)
}

fn first_token(s: &str) -> &str {
    s.split_whitespace().next().unwrap_or("")
}
