//! Run settings merged from defaults, an optional `key=value` file and flags,
//! in increasing precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use psatz_core::certify::PsatzMode;
use psatz_core::conemodel::ConeKind;
use psatz_core::polyalg::NormKind;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Structured,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "structured" => Ok(Format::Structured),
            other => Err(format!("unknown format `{other}` (expected text or structured)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: Option<PathBuf>,
    pub f: Option<String>,
    pub nvars: Option<usize>,
    pub norm: NormKind,
    pub cone: Option<ConeKind>,
    pub d: Option<u32>,
    pub t: Option<u32>,
    pub eps: f64,
    pub dmax: u32,
    pub mode: PsatzMode,
    pub feas_tol: Option<f64>,
    pub gap_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            system: None,
            f: None,
            nvars: None,
            norm: NormKind::LW,
            cone: None,
            d: None,
            t: None,
            eps: 1e-2,
            dmax: 6,
            mode: PsatzMode::Weighted,
            feas_tol: None,
            gap_tol: None,
            max_iter: None,
            format: Format::Text,
            out: None,
            seed: 0,
            samples: 100,
        }
    }
}

/// Reads `key=value` lines; `#` starts a comment. Keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| CliError::input(format!("config key `{key}`: {e}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply(&parse_config(&text)?)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, map: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in map {
            match k.as_str() {
                "system" => self.system = Some(PathBuf::from(v)),
                "f" => self.f = Some(v.clone()),
                "nvars" => self.nvars = Some(parse(k, v)?),
                "norm" => self.norm = parse(k, v)?,
                "cone" => self.cone = Some(parse(k, v)?),
                "d" => self.d = Some(parse(k, v)?),
                "t" => self.t = Some(parse(k, v)?),
                "eps" => self.eps = parse(k, v)?,
                "dmax" => self.dmax = parse(k, v)?,
                "mode" => self.mode = parse(k, v)?,
                "feas_tol" => self.feas_tol = Some(parse(k, v)?),
                "gap_tol" => self.gap_tol = Some(parse(k, v)?),
                "max_iter" => self.max_iter = Some(parse(k, v)?),
                "format" => self.format = parse(k, v)?,
                "out" => self.out = Some(PathBuf::from(v)),
                "seed" => self.seed = parse(k, v)?,
                "samples" => self.samples = parse(k, v)?,
                other => return Err(CliError::input(format!("unknown config key `{other}`"))),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("feas_tol", self.feas_tol), ("gap_tol", self.gap_tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::input(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.d == Some(0) {
            return Err(CliError::input("d must be at least 1"));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(CliError::input(format!("eps must be positive, got {}", self.eps)));
        }
        if self.dmax == 0 {
            return Err(CliError::input("dmax must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_accept_dashes_and_comments() {
        let m = parse_config("feas-tol = 1e-8 # tighter\n\nnorm=l1\n").unwrap();
        let mut c = RunConfig::default();
        c.apply(&m).unwrap();
        assert_eq!(c.feas_tol, Some(1e-8));
        assert_eq!(c.norm, NormKind::L1);
    }

    #[test]
    fn bad_values_are_input_errors() {
        let mut c = RunConfig::default();
        for text in ["d=0", "gap_tol=-1", "bogus=1", "norm=l2", "eps"] {
            let r = parse_config(text).and_then(|m| c.apply(&m));
            assert_eq!(r.unwrap_err().code, 1, "{text}");
        }
    }
}
