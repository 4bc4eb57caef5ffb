//! Finite necessary-condition checks on truncated moment sequences. Every
//! verdict is one-sided: passing at order `d` says nothing about `d + 1`.

use crate::conemodel::{half_degree, SemialgebraicSystem};
use crate::error::{Error, Result};
use crate::polyalg::{factorial, Exponent, Poly, WeightSequence};
use crate::real::Real;

use super::localizing::localizing_matrix;
use super::matrix::Spectrum;
use super::sequence::{dual_norm, riesz, MomentSequence};

#[derive(Clone, Debug, PartialEq)]
pub enum SupportVerdict<T> {
    /// `M_k(f y) ⪰ 0` for every `k ≤ d`.
    ConsistentUpTo(u32),
    Violated { order: u32, min_eigenvalue: T },
}

/// Checks `M_k(f y) ⪰ 0` for `k = 0..=d`, stopping at the first failure.
pub fn support_nonnegativity_test<T: Real>(
    y: &MomentSequence<T>,
    f: &Poly<T>,
    d: u32,
) -> Result<SupportVerdict<T>> {
    for k in 0..=d {
        let spec = localizing_matrix(y, f, k)?.spectrum();
        if !spec.is_psd() {
            return Ok(SupportVerdict::Violated {
                order: k,
                min_eigenvalue: spec.min,
            });
        }
    }
    Ok(SupportVerdict::ConsistentUpTo(d))
}

/// Status of `M_{d_j}(g_j y)` for one generator (`j = 0` is `g_0 = 1`).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizingCheck<T> {
    pub generator: usize,
    /// `d − v_j`, or `None` when negative and the generator was skipped.
    pub order: Option<u32>,
    pub spectrum: Option<Spectrum<T>>,
}

impl<T: Real> LocalizingCheck<T> {
    pub fn is_psd(&self) -> bool {
        self.spectrum.as_ref().is_none_or(Spectrum::is_psd)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KMomentVerdict<T> {
    NecessaryConditionsHold,
    Violated {
        generator: usize,
        order: u32,
        min_eigenvalue: T,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMomentReport<T> {
    pub checks: Vec<LocalizingCheck<T>>,
    /// `max_α |y_α| / w_α` with the `ℓw` weights.
    pub dual_norm_bound: T,
    pub verdict: KMomentVerdict<T>,
}

/// Localizing PSD conditions at order `d − v_j` for `g_0 = 1, g_1, …, g_m`,
/// plus the finite dual-norm bound.
pub fn kmoment_condition_check<T: Real>(
    y: &MomentSequence<T>,
    system: &SemialgebraicSystem<T>,
    d: u32,
) -> Result<KMomentReport<T>> {
    if system.nvars() != y.nvars() {
        return Err(Error::DimensionMismatch {
            expected: y.nvars(),
            found: system.nvars(),
        });
    }
    let one = Poly::constant(y.nvars(), T::one());
    let gens = std::iter::once(&one).chain(system.generators());
    let mut checks = Vec::new();
    let mut verdict = KMomentVerdict::NecessaryConditionsHold;
    for (j, g) in gens.enumerate() {
        let v = half_degree(g);
        if v > d {
            checks.push(LocalizingCheck {
                generator: j,
                order: None,
                spectrum: None,
            });
            continue;
        }
        let order = d - v;
        let spectrum = localizing_matrix(y, g, order)?.spectrum();
        if !spectrum.is_psd() && verdict == KMomentVerdict::NecessaryConditionsHold {
            verdict = KMomentVerdict::Violated {
                generator: j,
                order,
                min_eigenvalue: spectrum.min,
            };
        }
        checks.push(LocalizingCheck {
            generator: j,
            order: Some(order),
            spectrum: Some(spectrum),
        });
    }
    Ok(KMomentReport {
        checks,
        dual_norm_bound: dual_norm(y, &WeightSequence::lw()),
        verdict,
    })
}

/// One term `L_z(x_i^{2k})^{-1/2k}` of a Carleman series.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlemanTerm<T> {
    pub k: u32,
    pub moment: T,
    /// `None` when `moment ≤ 0`; the term is skipped.
    pub term: Option<T>,
    /// Cumulative sum over `1..=k`.
    pub partial_sum: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CarlemanSeries<T> {
    pub variable: usize,
    pub terms: Vec<CarlemanTerm<T>>,
    /// `max_k L_y(x_i^{2k}) / (2k)!` over the available `k ≤ K`.
    pub moment_bound: T,
    /// The same bound for the shifted sequence `z`.
    pub shifted_bound: T,
}

impl<T: Real> CarlemanSeries<T> {
    pub fn partial_sum(&self) -> T {
        self.terms.last().map_or(T::zero(), |t| t.partial_sum)
    }

    pub fn flagged(&self) -> usize {
        self.terms.iter().filter(|t| t.term.is_none()).count()
    }

    /// Whether the partial sums never decrease.
    pub fn is_monotone(&self) -> bool {
        self.terms.windows(2).all(|w| w[1].partial_sum >= w[0].partial_sum)
    }
}

/// Carleman partial sums for `z_α = L_y(x^α f)` (`f = None` means `f = 1`),
/// one series per variable, `k = 1..=K`.
pub fn carleman_diagnostic<T: Real>(
    y: &MomentSequence<T>,
    f: Option<&Poly<T>>,
    terms: u32,
) -> Result<Vec<CarlemanSeries<T>>> {
    let n = y.nvars();
    let one = Poly::constant(n, T::one());
    let f = f.unwrap_or(&one);
    y.check_dim(f)?;
    let need = 2 * terms + f.degree();
    if need > y.max_degree() {
        return Err(Error::DegreeOutOfRange {
            exponent: format!("2*{terms} + deg f = {need}"),
            max_degree: y.max_degree(),
        });
    }
    let z = y.shifted(f)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut sum = T::zero();
        let mut series = Vec::with_capacity(terms as usize);
        let mut moment_bound = T::zero();
        let mut shifted_bound = T::zero();
        for k in 1..=terms {
            let e = Exponent::power(n, i, 2 * k);
            let zk = z.get(&e)?;
            let yk = riesz(y, &Poly::monomial(e, T::one()))?;
            if let Some(fact) = factorial(2 * k).and_then(T::from_f64_checked) {
                moment_bound = num_traits::Float::max(moment_bound, yk / fact);
                shifted_bound = num_traits::Float::max(shifted_bound, zk / fact);
            }
            let term = if zk > T::zero() {
                let p = T::from_f64_checked(-1.0 / (2.0 * k as f64)).expect("finite exponent");
                Some(num_traits::Float::powf(zk, p))
            } else {
                None
            };
            if let Some(t) = term {
                sum += t;
            }
            series.push(CarlemanTerm {
                k,
                moment: zk,
                term,
                partial_sum: sum,
            });
        }
        out.push(CarlemanSeries {
            variable: i,
            terms: series,
            moment_bound,
            shifted_bound,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conemodel::parse_system;
    use crate::polyalg::parse_polynomial;

    fn lebesgue_01(d: u32) -> MomentSequence<f64> {
        MomentSequence::from_fn(1, d, |e| 1.0 / (e.total_degree() as f64 + 1.0)).unwrap()
    }

    fn lebesgue_pm1(d: u32) -> MomentSequence<f64> {
        MomentSequence::from_fn(1, d, |e| {
            let a = e.total_degree();
            if a % 2 == 1 { 0.0 } else { 2.0 / (a as f64 + 1.0) }
        })
        .unwrap()
    }

    fn double_factorial(k: u32) -> f64 {
        (1..=k).rev().step_by(2).map(f64::from).product()
    }

    fn gaussian(d: u32) -> MomentSequence<f64> {
        MomentSequence::from_fn(1, d, |e| {
            let a = e.total_degree();
            if a % 2 == 1 { 0.0 } else if a == 0 { 1.0 } else { double_factorial(a - 1) }
        })
        .unwrap()
    }

    #[test]
    fn support_test_examples() {
        let x: Poly<f64> = parse_polynomial("x1", 1).unwrap();
        assert_eq!(
            support_nonnegativity_test(&lebesgue_01(6), &x, 2).unwrap(),
            SupportVerdict::ConsistentUpTo(2)
        );
        match support_nonnegativity_test(&lebesgue_pm1(6), &x, 2).unwrap() {
            SupportVerdict::Violated { order, min_eigenvalue } => {
                assert_eq!(order, 1);
                assert!((min_eigenvalue + 2.0 / 3.0).abs() < 1e-12);
            }
            v => panic!("unexpected {v:?}"),
        }
        let dirac = MomentSequence::from_atoms(1, 8, &[(1.0, vec![0.7])]).unwrap();
        for d in 0..=3 {
            assert_eq!(
                support_nonnegativity_test(&dirac, &x, d).unwrap(),
                SupportVerdict::ConsistentUpTo(d)
            );
        }
        assert!(support_nonnegativity_test(&dirac, &x, 4).is_err());
    }

    #[test]
    fn kmoment_on_unit_square() {
        // Lebesgue on [0,1]^2: y_a = 1/((a1+1)(a2+1))
        let y = MomentSequence::from_fn(2, 6, |e| {
            e.entries().iter().map(|&a| 1.0 / (a as f64 + 1.0)).product()
        })
        .unwrap();
        let s = parse_system::<f64>("n 2\ng: x1\ng: 1 - x1\ng: x2\ng: 1 - x2\n").unwrap();
        let r = kmoment_condition_check(&y, &s, 3).unwrap();
        assert_eq!(r.verdict, KMomentVerdict::NecessaryConditionsHold);
        assert_eq!(r.checks.len(), 5);
        assert!(r.checks.iter().all(|c| c.order.is_some() && c.is_psd()));

        let outside = MomentSequence::from_atoms(2, 6, &[(1.0, vec![1.5, 0.5])]).unwrap();
        match kmoment_condition_check(&outside, &s, 1).unwrap().verdict {
            KMomentVerdict::Violated { generator, .. } => assert_eq!(generator, 2),
            v => panic!("unexpected {v:?}"),
        }

        let zero = MomentSequence::zeros(2, 6).unwrap();
        let r = kmoment_condition_check(&zero, &s, 3).unwrap();
        assert_eq!(r.verdict, KMomentVerdict::NecessaryConditionsHold);
        assert_eq!(r.dual_norm_bound, 0.0);
    }

    #[test]
    fn carleman_gaussian() {
        let y = gaussian(16);
        let s = carleman_diagnostic(&y, None, 5).unwrap();
        assert!(s[0].partial_sum() > 1.5);
        assert_eq!(s[0].flagged(), 0);
        assert!((s[0].terms[1].moment - 3.0).abs() < 1e-12);

        let x2: Poly<f64> = parse_polynomial("x1^2", 1).unwrap();
        let mut prev = 0.0;
        for k in 3..=7 {
            let s = carleman_diagnostic(&y, Some(&x2), k).unwrap();
            assert!(s[0].is_monotone());
            assert!(s[0].partial_sum() > prev);
            assert!(s[0].shifted_bound < 2.0);
            prev = s[0].partial_sum();
        }
        assert!(carleman_diagnostic(&y, Some(&x2), 8).is_err());
    }

    #[test]
    fn carleman_dirac_flags() {
        let y = MomentSequence::from_atoms(2, 8, &[(1.0, vec![0.0, 0.0])]).unwrap();
        let s = carleman_diagnostic(&y, None, 4).unwrap();
        for series in &s {
            assert_eq!(series.flagged(), 4);
            assert_eq!(series.partial_sum(), 0.0);
        }
    }
}
