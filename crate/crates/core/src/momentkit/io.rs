//! Moment sequence files: a header `n <n> degree <2d>` (optionally followed by
//! `measure`), then one `α_1 … α_n value` line per exponent.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::polyalg::Exponent;
use crate::real::Real;

use super::sequence::MomentSequence;

pub fn parse_moments<T: Real>(text: &str) -> Result<MomentSequence<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::format(0, "empty moment file"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    let bad_header = || Error::format(hline, "expected `n <n> degree <2d>`");
    if tok.len() < 4 || tok[0] != "n" || tok[2] != "degree" {
        return Err(bad_header());
    }
    let n: usize = tok[1].parse().map_err(|_| bad_header())?;
    let degree: u32 = tok[3].parse().map_err(|_| bad_header())?;
    let measure = match tok.get(4) {
        None => false,
        Some(&"measure") if tok.len() == 5 => true,
        _ => return Err(bad_header()),
    };
    if n == 0 {
        return Err(Error::format(hline, "dimension must be at least 1"));
    }

    let mut seen: HashMap<Exponent, T> = HashMap::new();
    for (lineno, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        if tok.len() != n + 1 {
            return Err(Error::format(
                lineno,
                format!("expected {n} exponents and a value, found {} fields", tok.len()),
            ));
        }
        let entries = tok[..n]
            .iter()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::format(lineno, "malformed exponent"))?;
        let e = Exponent::new(entries);
        if e.total_degree() > degree {
            return Err(Error::format(lineno, format!("exponent {e} exceeds degree {degree}")));
        }
        let value = tok[n]
            .parse::<f64>()
            .ok()
            .and_then(T::from_f64_checked)
            .filter(|v| num_traits::Float::is_finite(*v))
            .ok_or_else(|| Error::format(lineno, format!("malformed value `{}`", tok[n])))?;
        if seen.insert(e.clone(), value).is_some() {
            return Err(Error::format(lineno, format!("duplicate entry for {e}")));
        }
    }
    let mut missing = None;
    let y = MomentSequence::from_fn(n, degree, |e| {
        seen.get(e).copied().unwrap_or_else(|| {
            missing.get_or_insert_with(|| e.clone());
            T::zero()
        })
    })?;
    if let Some(e) = missing {
        return Err(Error::Invalid(format!("moment file has no entry for {e}")));
    }
    let y = y.with_measure_claim(measure);
    y.check_measure_claim()?;
    Ok(y)
}

pub fn format_moments<T: Real>(y: &MomentSequence<T>) -> String {
    let mut out = format!("n {} degree {}", y.nvars(), y.max_degree());
    if y.claims_measure() {
        out.push_str(" measure");
    }
    out.push('\n');
    for (e, v) in y.iter() {
        for a in e.entries() {
            out.push_str(&a.to_string());
            out.push(' ');
        }
        out.push_str(&format!("{:e}\n", v.to_f64_lossy()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let y = MomentSequence::from_atoms(2, 4, &[(0.25, vec![0.1, -3.0]), (0.75, vec![1.0 / 3.0, 2.0])]).unwrap();
        let back: MomentSequence<f64> = parse_moments(&format_moments(&y)).unwrap();
        assert_eq!(back, y);
        assert!(back.claims_measure());
    }

    #[test]
    fn rejects_incomplete_and_duplicates() {
        assert!(parse_moments::<f64>("n 1 degree 2\n0 1\n1 0\n").is_err());
        assert!(parse_moments::<f64>("n 1 degree 1\n0 1\n1 0\n1 2\n").is_err());
        assert!(parse_moments::<f64>("n 1 degree 1\n0 1\n2 0\n").is_err());
        assert!(parse_moments::<f64>("n 1 degree 1 measure\n0 -1\n1 0\n").is_err());
        assert!(parse_moments::<f64>("degree 1\n").is_err());
        let y = parse_moments::<f64>("# comment\nn 1 degree 1\n1 0.5\n0 1\n").unwrap();
        assert_eq!(y.values(), &[1.0, 0.5]);
    }
}
