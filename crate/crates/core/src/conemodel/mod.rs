//! The set `K = {x : g_j(x) ≥ 0}` and Gram parameterizations of the truncated
//! preordering `P_k(g)` and quadratic module `Q_k(g)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::momentkit::{build_basis_matrices, BasisMatrixSet, SymMatrix};
use crate::polyalg::{format_polynomial, parse_polynomial, Poly};
use crate::real::{FromRational, Real, TextCoefficient};

/// Default bound on the number of generators of a preordering (2^m blocks).
pub const DEFAULT_PREORDER_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ConeKind {
    /// `Σ_j σ_j g_j`, `j = 0..m`.
    #[default]
    QuadraticModule,
    /// `Σ_J σ_J g_J` over all subsets `J`.
    Preordering,
}

impl std::str::FromStr for ConeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quadratic" | "quadratic-module" | "q" => Ok(ConeKind::QuadraticModule),
            "preorder" | "preordering" | "p" => Ok(ConeKind::Preordering),
            other => Err(Error::Invalid(format!(
                "unknown cone `{other}` (expected quadratic or preorder)"
            ))),
        }
    }
}

impl fmt::Display for ConeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConeKind::QuadraticModule => "quadratic",
            ConeKind::Preordering => "preorder",
        })
    }
}

/// Subset `J ⊆ {1..m}` labelling a product `g_J` (1-based, sorted).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BlockLabel(pub Vec<usize>);

impl BlockLabel {
    pub fn empty() -> Self {
        BlockLabel(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

impl std::str::FromStr for BlockLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| Error::Invalid(format!("malformed block label `{s}`")))?;
        if inner.trim().is_empty() {
            return Ok(BlockLabel::empty());
        }
        inner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("malformed block label `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(BlockLabel)
    }
}

/// Generators `g_1..g_m` of `K` (with `g_0 = 1` implicit) and the cone built
/// from them.
#[derive(Clone, Debug, PartialEq)]
pub struct SemialgebraicSystem<T: Real> {
    nvars: usize,
    generators: Vec<Poly<T>>,
    kind: ConeKind,
    preorder_cap: usize,
}

impl<T: Real> SemialgebraicSystem<T> {
    pub fn new(nvars: usize, generators: Vec<Poly<T>>, kind: ConeKind) -> Result<Self> {
        Self::with_cap(nvars, generators, kind, DEFAULT_PREORDER_CAP)
    }

    pub fn with_cap(
        nvars: usize,
        generators: Vec<Poly<T>>,
        kind: ConeKind,
        preorder_cap: usize,
    ) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Invalid("the ambient dimension must be at least 1".into()));
        }
        for g in &generators {
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: g.nvars(),
                });
            }
        }
        if kind == ConeKind::Preordering && generators.len() > preorder_cap {
            return Err(Error::PreorderCap {
                generators: generators.len(),
                cap: preorder_cap,
            });
        }
        Ok(SemialgebraicSystem {
            nvars,
            generators,
            kind,
            preorder_cap,
        })
    }

    /// `K = R^n`.
    pub fn unconstrained(nvars: usize) -> Self {
        Self::new(nvars, Vec::new(), ConeKind::QuadraticModule).expect("valid empty system")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Poly<T>] {
        &self.generators
    }

    pub fn kind(&self) -> ConeKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: ConeKind) -> Result<Self> {
        if kind == ConeKind::Preordering && self.generators.len() > self.preorder_cap {
            return Err(Error::PreorderCap {
                generators: self.generators.len(),
                cap: self.preorder_cap,
            });
        }
        self.kind = kind;
        Ok(self)
    }

    /// Whether `p ∈ K`, up to `slack`.
    pub fn contains(&self, point: &[T], slack: T) -> bool {
        self.generators.iter().all(|g| g.eval(point) >= -slack)
    }

    /// Products `g_J` in block order: `∅` first, then by subset size and
    /// lexicographically. Quadratic modules only use `∅` and singletons.
    pub fn products(&self) -> Result<Vec<(BlockLabel, Poly<T>)>> {
        let m = self.generators.len();
        let mut subsets: Vec<Vec<usize>> = match self.kind {
            ConeKind::QuadraticModule => {
                std::iter::once(Vec::new()).chain((1..=m).map(|j| vec![j])).collect()
            }
            ConeKind::Preordering => (0u64..(1u64 << m))
                .map(|mask| (1..=m).filter(|j| mask & (1 << (j - 1)) != 0).collect())
                .collect(),
        };
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        subsets
            .into_iter()
            .map(|s| {
                let mut prod = Poly::constant(self.nvars, T::one());
                for &j in &s {
                    prod = prod.mul(&self.generators[j - 1])?;
                }
                Ok((BlockLabel(s), prod))
            })
            .collect()
    }
}

/// `v_J = ⌈deg g_J / 2⌉`.
pub fn half_degree<T: Real>(g: &Poly<T>) -> u32 {
    g.degree().div_ceil(2)
}

/// One `σ_J g_J` term of a truncated cone.
#[derive(Clone, Debug)]
pub struct ConeBlock<T: Real> {
    pub label: BlockLabel,
    pub product: Poly<T>,
    pub half_degree: u32,
    /// `k − v_J`; the Gram matrix is indexed by `N^n_{sos_order}`.
    pub sos_order: u32,
    pub basis: BasisMatrixSet<T>,
}

impl<T: Real> ConeBlock<T> {
    pub fn side(&self) -> usize {
        self.basis.side()
    }
}

/// A product dropped because `k − v_J < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcludedBlock {
    pub label: BlockLabel,
    pub half_degree: u32,
}

/// `P_k(g)` or `Q_k(g)` as a list of Gram blocks.
#[derive(Clone, Debug)]
pub struct ConeTruncation<T: Real> {
    system: SemialgebraicSystem<T>,
    level: u32,
    blocks: Vec<ConeBlock<T>>,
    excluded: Vec<ExcludedBlock>,
}

impl<T: Real> ConeTruncation<T> {
    pub fn system(&self) -> &SemialgebraicSystem<T> {
        &self.system
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn blocks(&self) -> &[ConeBlock<T>] {
        &self.blocks
    }

    pub fn excluded(&self) -> &[ExcludedBlock] {
        &self.excluded
    }

    pub fn nvars(&self) -> usize {
        self.system.nvars()
    }

    /// Elements of the truncation have degree at most `2k`.
    pub fn degree(&self) -> u32 {
        2 * self.level
    }
}

pub fn build_truncation<T: Real>(system: &SemialgebraicSystem<T>, level: u32) -> Result<ConeTruncation<T>> {
    let mut blocks = Vec::new();
    let mut excluded = Vec::new();
    for (label, product) in system.products()? {
        let v = half_degree(&product);
        if product.is_zero() || v > level {
            excluded.push(ExcludedBlock { label, half_degree: v });
            continue;
        }
        let sos_order = level - v;
        let basis = build_basis_matrices(&product, sos_order)?;
        blocks.push(ConeBlock {
            label,
            product,
            half_degree: v,
            sos_order,
            basis,
        });
    }
    Ok(ConeTruncation {
        system: system.clone(),
        level,
        blocks,
        excluded,
    })
}

/// `h_α = Σ_J ⟨X_J, B^J_α⟩`.
pub fn gram_reconstruct<T: Real>(trunc: &ConeTruncation<T>, grams: &[SymMatrix<T>]) -> Result<Poly<T>> {
    if grams.len() != trunc.blocks.len() {
        return Err(Error::DimensionMismatch {
            expected: trunc.blocks.len(),
            found: grams.len(),
        });
    }
    let mut terms = Vec::new();
    for (block, x) in trunc.blocks.iter().zip(grams) {
        if x.side() != block.side() {
            return Err(Error::DimensionMismatch {
                expected: block.side(),
                found: x.side(),
            });
        }
        for (alpha, b) in block.basis.iter() {
            terms.push((alpha.clone(), b.inner_dense(x)));
        }
    }
    Poly::from_terms(trunc.nvars(), terms)
}

/// Parses the system file format:
///
/// ```text
/// n 2
/// cone quadratic
/// g: 1 - x1^2 - x2^2
/// ```
pub fn parse_system<T: Real + FromRational>(text: &str) -> Result<SemialgebraicSystem<T>> {
    let mut nvars = None;
    let mut kind = ConeKind::default();
    let mut generators = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        if let Some(expr) = line.strip_prefix("g:") {
            let n = nvars.ok_or_else(|| Error::format(lineno, "`n` must precede generators"))?;
            let g = parse_polynomial(expr, n).map_err(|e| Error::format(lineno, e.to_string()))?;
            generators.push(g);
        } else if let Some(rest) = line.strip_prefix("n ") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::format(lineno, "expected `n <dimension>`"))?;
            if nvars.is_some() {
                return Err(Error::format(lineno, "dimension given twice"));
            }
            nvars = Some(n);
        } else if let Some(rest) = line.strip_prefix("cone ") {
            kind = rest.trim().parse().map_err(|e: Error| Error::format(lineno, e.to_string()))?;
        } else {
            return Err(Error::format(lineno, format!("unrecognized line `{line}`")));
        }
    }
    let n = nvars.ok_or_else(|| Error::format(0, "missing `n <dimension>` line"))?;
    SemialgebraicSystem::new(n, generators, kind)
}

pub fn format_system<T: Real + TextCoefficient>(system: &SemialgebraicSystem<T>) -> String {
    let mut out = format!("n {}\ncone {}\n", system.nvars(), system.kind());
    for g in system.generators() {
        out.push_str("g: ");
        out.push_str(&format_polynomial(g));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::Exponent;

    fn sys(text: &str) -> SemialgebraicSystem<f64> {
        parse_system(text).unwrap()
    }

    #[test]
    fn unconstrained_is_plain_sos() {
        for kind in ["quadratic", "preorder"] {
            let s = sys(&format!("n 2\ncone {kind}\n"));
            let t = build_truncation(&s, 3).unwrap();
            assert_eq!(t.blocks().len(), 1);
            assert_eq!(t.blocks()[0].sos_order, 3);
            assert_eq!(t.blocks()[0].side(), 10);
        }
    }

    #[test]
    fn preordering_subsets() {
        let s = sys("n 1\ncone preorder\ng: x1\ng: 1 - x1\n");
        let t = build_truncation(&s, 2).unwrap();
        let labels: Vec<String> = t.blocks().iter().map(|b| b.label.to_string()).collect();
        assert_eq!(labels, ["{}", "{1}", "{2}", "{1,2}"]);
        let q = build_truncation(&s.clone().with_kind(ConeKind::QuadraticModule).unwrap(), 2).unwrap();
        assert_eq!(q.blocks().len(), 3);
    }

    #[test]
    fn exclusion_recorded() {
        let s = sys("n 1\ng: x1^3\n");
        let t = build_truncation(&s, 1).unwrap();
        assert_eq!(t.blocks().len(), 1);
        assert_eq!(t.excluded(), &[ExcludedBlock { label: BlockLabel(vec![1]), half_degree: 2 }]);
    }

    #[test]
    fn cap_enforced() {
        let gens: Vec<Poly<f64>> = (0..13).map(|_| Poly::constant(1, 1.0)).collect();
        assert!(matches!(
            SemialgebraicSystem::new(1, gens.clone(), ConeKind::Preordering),
            Err(Error::PreorderCap { generators: 13, cap: 12 })
        ));
        assert!(SemialgebraicSystem::new(1, gens, ConeKind::QuadraticModule).is_ok());
    }

    #[test]
    fn identity_gram_reconstructs() {
        let s = SemialgebraicSystem::<f64>::unconstrained(1);
        let t = build_truncation(&s, 1).unwrap();
        let h = gram_reconstruct(&t, &[SymMatrix::identity(2)]).unwrap();
        let expect = Poly::from_terms(1, [(Exponent::new(vec![0]), 1.0), (Exponent::new(vec![2]), 1.0)]).unwrap();
        assert_eq!(h, expect);
        let z = gram_reconstruct(&t, &[SymMatrix::zeros(2)]).unwrap();
        assert!(z.is_zero());
        assert!(gram_reconstruct(&t, &[SymMatrix::zeros(3)]).is_err());
        assert!(gram_reconstruct(&t, &[]).is_err());
    }

    #[test]
    fn system_file_roundtrip_and_errors() {
        let s = sys("# unit disk\nn 2\ncone preorder\ng: 1 - x1^2 - x2^2\ng: x1\n");
        assert_eq!(s.generators().len(), 2);
        assert_eq!(s.kind(), ConeKind::Preordering);
        let again: SemialgebraicSystem<f64> = parse_system(&format_system(&s)).unwrap();
        assert_eq!(again, s);
        assert!(parse_system::<f64>("g: x1\nn 1\n").is_err());
        assert!(parse_system::<f64>("n 1\ng: x2\n").is_err());
        assert!(parse_system::<f64>("n 1\ncone weird\n").is_err());
        assert!(parse_system::<f64>("cone quadratic\n").is_err());
        assert_eq!("{1,2}".parse::<BlockLabel>().unwrap(), BlockLabel(vec![1, 2]));
        assert_eq!("{}".parse::<BlockLabel>().unwrap(), BlockLabel::empty());
    }
}
