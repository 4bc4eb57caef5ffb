//! Homogeneous self-dual embedding of the conic pair
//!
//! ```text
//! min c'x  s.t.  Gx + s = h, s ⪰ 0        max −h'z  s.t.  G'z + c = 0, z ⪰ 0
//! ```
//!
//! with `x = y`, `Gx = Σ y_i A_i`, `h = C`, `c = −b`, so that `z` is the
//! primal matrix `X` and `s` the dual slack `S`. Iterates use Nesterov–Todd
//! scaling and Mehrotra predictor-corrector steps.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::problem::{BlockKind, BlockSpec, SdpProblem, Sense};
use crate::error::Result;
use crate::momentkit::SymMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feas_tol: 1e-7,
            gap_tol: 1e-6,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// No `X` satisfies the constraints; see [`SdpSolution::farkas`].
    Infeasible,
    /// The primal objective improves without bound; see
    /// [`SdpSolution::improving_ray`].
    Unbounded,
    MaxIter,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::MaxIter => "max-iter",
            SolveStatus::NumericalFailure => "numerical-failure",
        })
    }
}

/// Solver output in the user's sense. Diagonal blocks are returned as diagonal
/// matrices. For `Sense::Max` the dual is `min b'y` with `Σ y_i A_i − C ⪰ 0`.
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SolveStatus,
    pub primal: Vec<SymMatrix<f64>>,
    pub dual: Vec<f64>,
    pub slack: Vec<SymMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Relative duality gap at the returned iterate.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    /// When infeasible: `y` with `Σ y_i A_i ⪯ 0` and `b'y = 1`.
    pub farkas: Option<Vec<f64>>,
    /// When unbounded: `X` in the cone with `⟨A_i, X⟩ = 0` and improving
    /// objective of magnitude one.
    pub improving_ray: Option<Vec<SymMatrix<f64>>>,
}

#[derive(Clone, Debug)]
enum Blk {
    Psd(DMatrix<f64>),
    Lp(DVector<f64>),
}

type CVec = Vec<Blk>;

fn dot(a: &CVec, b: &CVec) -> f64 {
    a.iter()
        .zip(b)
        .map(|p| match p {
            (Blk::Psd(u), Blk::Psd(v)) => u.dot(v),
            (Blk::Lp(u), Blk::Lp(v)) => u.dot(v),
            _ => unreachable!("block kinds always align"),
        })
        .sum()
}

fn norm(a: &CVec) -> f64 {
    dot(a, a).sqrt()
}

/// `a += t·b`.
fn axpy(a: &mut CVec, t: f64, b: &CVec) {
    for p in a.iter_mut().zip(b) {
        match p {
            (Blk::Psd(u), Blk::Psd(v)) => *u += v * t,
            (Blk::Lp(u), Blk::Lp(v)) => *u += v * t,
            _ => unreachable!("block kinds always align"),
        }
    }
}

fn scaled(a: &CVec, t: f64) -> CVec {
    a.iter()
        .map(|b| match b {
            Blk::Psd(u) => Blk::Psd(u * t),
            Blk::Lp(u) => Blk::Lp(u * t),
        })
        .collect()
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn identity(spec: &[BlockSpec]) -> CVec {
    spec.iter()
        .map(|b| match b.kind {
            BlockKind::Psd => Blk::Psd(DMatrix::identity(b.side, b.side)),
            BlockKind::NonnegDiag => Blk::Lp(DVector::from_element(b.side, 1.0)),
        })
        .collect()
}

fn zeros(spec: &[BlockSpec]) -> CVec {
    spec.iter()
        .map(|b| match b.kind {
            BlockKind::Psd => Blk::Psd(DMatrix::zeros(b.side, b.side)),
            BlockKind::NonnegDiag => Blk::Lp(DVector::zeros(b.side)),
        })
        .collect()
}

/// Largest eigenvalue of `−a` over all blocks (`−∞` for an empty cone).
fn max_neg_eig(a: &CVec) -> f64 {
    a.iter()
        .map(|b| match b {
            Blk::Psd(u) if u.nrows() > 0 => -u.clone().symmetric_eigenvalues().min(),
            Blk::Lp(u) if !u.is_empty() => -u.min(),
            _ => f64::NEG_INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Nesterov–Todd scaling of one block: `W z = W^{-T} s = λ`.
enum Scaling {
    /// `W z = rᵀ z r`, `W^{-T} s = rit' s rit` with `rit = r^{-T}`.
    Psd {
        r: DMatrix<f64>,
        rit: DMatrix<f64>,
        lam: DVector<f64>,
        /// `r rᵀ`
        hm: DMatrix<f64>,
        /// `rit ritᵀ`
        gi: DMatrix<f64>,
    },
    /// `W = diag(d)`.
    Lp { d: DVector<f64>, lam: DVector<f64> },
}

impl Scaling {
    fn identity(spec: &BlockSpec) -> Self {
        let n = spec.side;
        match spec.kind {
            BlockKind::Psd => Scaling::Psd {
                r: DMatrix::identity(n, n),
                rit: DMatrix::identity(n, n),
                lam: DVector::from_element(n, 1.0),
                hm: DMatrix::identity(n, n),
                gi: DMatrix::identity(n, n),
            },
            BlockKind::NonnegDiag => Scaling::Lp {
                d: DVector::from_element(n, 1.0),
                lam: DVector::from_element(n, 1.0),
            },
        }
    }

    fn nt(s: &Blk, z: &Blk) -> Option<Self> {
        match (s, z) {
            (Blk::Psd(s), Blk::Psd(z)) => {
                let n = s.nrows();
                if n == 0 {
                    return Some(Scaling::identity(&BlockSpec { side: 0, kind: BlockKind::Psd }));
                }
                let ls = Cholesky::new(s.clone())?.l();
                let lz = Cholesky::new(z.clone())?.l();
                let svd = (lz.transpose() * &ls).svd(true, true);
                let lam = svd.singular_values.clone();
                if lam.iter().any(|&l| l <= 0.0 || !l.is_finite()) {
                    return None;
                }
                let u = svd.u?;
                let v = svd.v_t?.transpose();
                let isq = DMatrix::from_diagonal(&lam.map(|l| 1.0 / l.sqrt()));
                let r = ls * v * &isq;
                let rit = lz * u * &isq;
                let hm = sym(&r * r.transpose());
                let gi = sym(&rit * rit.transpose());
                Some(Scaling::Psd { r, rit, lam, hm, gi })
            }
            (Blk::Lp(s), Blk::Lp(z)) => {
                if s.iter().chain(z.iter()).any(|&v| v.is_nan() || v <= 0.0) {
                    return None;
                }
                let d = s.zip_map(z, |a, b| (a / b).sqrt());
                let lam = s.zip_map(z, |a, b| (a * b).sqrt());
                Some(Scaling::Lp { d, lam })
            }
            _ => unreachable!("block kinds always align"),
        }
    }

    /// `W z`
    fn w(&self, z: &Blk) -> Blk {
        match (self, z) {
            (Scaling::Psd { r, .. }, Blk::Psd(z)) => Blk::Psd(sym(r.transpose() * z * r)),
            (Scaling::Lp { d, .. }, Blk::Lp(z)) => Blk::Lp(z.component_mul(d)),
            _ => unreachable!(),
        }
    }

    /// `W^{-T} s`
    fn winvt(&self, s: &Blk) -> Blk {
        match (self, s) {
            (Scaling::Psd { rit, .. }, Blk::Psd(s)) => Blk::Psd(sym(rit.transpose() * s * rit)),
            (Scaling::Lp { d, .. }, Blk::Lp(s)) => Blk::Lp(s.component_div(d)),
            _ => unreachable!(),
        }
    }

    /// `Wᵀ u`
    fn wt(&self, u: &Blk) -> Blk {
        match (self, u) {
            (Scaling::Psd { r, .. }, Blk::Psd(u)) => Blk::Psd(sym(r * u * r.transpose())),
            (Scaling::Lp { d, .. }, Blk::Lp(u)) => Blk::Lp(u.component_mul(d)),
            _ => unreachable!(),
        }
    }

    /// `WᵀW u`
    fn h(&self, u: &Blk) -> Blk {
        match (self, u) {
            (Scaling::Psd { hm, .. }, Blk::Psd(u)) => Blk::Psd(sym(hm * u * hm)),
            (Scaling::Lp { d, .. }, Blk::Lp(u)) => Blk::Lp(u.component_mul(&d.component_mul(d))),
            _ => unreachable!(),
        }
    }

    /// `(WᵀW)^{-1} u`
    fn hinv(&self, u: &Blk) -> Blk {
        match (self, u) {
            (Scaling::Psd { gi, .. }, Blk::Psd(u)) => Blk::Psd(sym(gi * u * gi)),
            (Scaling::Lp { d, .. }, Blk::Lp(u)) => Blk::Lp(u.component_div(&d.component_mul(d))),
            _ => unreachable!(),
        }
    }

    fn lam(&self) -> &DVector<f64> {
        match self {
            Scaling::Psd { lam, .. } | Scaling::Lp { lam, .. } => lam,
        }
    }

    /// `λ ⋄ λ`
    fn lam_sq(&self) -> Blk {
        match self {
            Scaling::Psd { lam, .. } => Blk::Psd(DMatrix::from_diagonal(&lam.component_mul(lam))),
            Scaling::Lp { lam, .. } => Blk::Lp(lam.component_mul(lam)),
        }
    }

    /// The `u` with `λ ⋄ u = v`.
    fn lam_solve(&self, v: &Blk) -> Blk {
        match (self, v) {
            (Scaling::Psd { lam, .. }, Blk::Psd(v)) => {
                Blk::Psd(DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| 2.0 * v[(i, j)] / (lam[i] + lam[j])))
            }
            (Scaling::Lp { lam, .. }, Blk::Lp(v)) => Blk::Lp(v.component_div(lam)),
            _ => unreachable!(),
        }
    }

    /// Largest `α` with `λ + α·v` in the cone (`∞` if unbounded).
    fn max_step(&self, v: &Blk) -> f64 {
        let lam = self.lam();
        let e = match v {
            Blk::Psd(v) => {
                if v.nrows() == 0 {
                    return f64::INFINITY;
                }
                let m = DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] / (lam[i] * lam[j]).sqrt());
                sym(m).symmetric_eigenvalues().min()
            }
            Blk::Lp(v) => v.component_div(lam).iter().copied().fold(f64::INFINITY, f64::min),
        };
        if e < 0.0 {
            -1.0 / e
        } else {
            f64::INFINITY
        }
    }
}

fn sym_prod(a: &Blk, b: &Blk) -> Blk {
    match (a, b) {
        (Blk::Psd(a), Blk::Psd(b)) => Blk::Psd(sym(a * b)),
        (Blk::Lp(a), Blk::Lp(b)) => Blk::Lp(a.component_mul(b)),
        _ => unreachable!(),
    }
}

/// One block's coefficients for a single constraint; `full` lists both
/// triangles.
struct BlockPart {
    con: usize,
    full: Vec<(usize, usize, f64)>,
}

struct Data {
    spec: Vec<BlockSpec>,
    /// Per block, the constraints with a nonzero part in that block.
    parts: Vec<Vec<BlockPart>>,
    m: usize,
    /// `c = −b`
    c: DVector<f64>,
    /// `h = C` in min sense.
    h: CVec,
    degree: usize,
}

impl Data {
    fn new(p: &SdpProblem) -> Self {
        let spec = p.blocks().to_vec();
        let m = p.num_constraints();
        let mut parts: Vec<Vec<BlockPart>> = spec.iter().map(|_| Vec::new()).collect();
        for (con, c) in p.constraints().iter().enumerate() {
            for (b, i, j, v) in c.coeffs.iter() {
                let list = &mut parts[b];
                if list.last().is_none_or(|l: &BlockPart| l.con != con) {
                    list.push(BlockPart { con, full: Vec::new() });
                }
                let part = list.last_mut().expect("just pushed");
                part.full.push((i, j, v));
                if i != j {
                    part.full.push((j, i, v));
                }
            }
        }
        let sign = match p.sense() {
            Sense::Min => 1.0,
            Sense::Max => -1.0,
        };
        let mut h = zeros(&spec);
        for (b, i, j, v) in p.objective().iter() {
            match &mut h[b] {
                Blk::Psd(u) => {
                    u[(i, j)] = sign * v;
                    u[(j, i)] = sign * v;
                }
                Blk::Lp(u) => u[i] = sign * v,
            }
        }
        let c = DVector::from_iterator(m, p.constraints().iter().map(|c| -c.rhs));
        let degree = spec.iter().map(|b| b.side).sum();
        Data {
            spec,
            parts,
            m,
            c,
            h,
            degree,
        }
    }

    /// `Σ x_i A_i`
    fn g(&self, x: &DVector<f64>) -> CVec {
        let mut out = zeros(&self.spec);
        for (b, list) in self.parts.iter().enumerate() {
            for part in list {
                let t = x[part.con];
                match &mut out[b] {
                    Blk::Psd(u) => {
                        for &(i, j, v) in &part.full {
                            u[(i, j)] += t * v;
                        }
                    }
                    Blk::Lp(u) => {
                        for &(i, _, v) in &part.full {
                            u[i] += t * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// `(⟨A_i, z⟩)_i`
    fn gt(&self, z: &CVec) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (b, list) in self.parts.iter().enumerate() {
            for part in list {
                out[part.con] += match &z[b] {
                    Blk::Psd(u) => part.full.iter().map(|&(i, j, v)| v * u[(i, j)]).sum::<f64>(),
                    Blk::Lp(u) => part.full.iter().map(|&(i, _, v)| v * u[i]).sum::<f64>(),
                };
            }
        }
        out
    }

    /// `G'H^{-1}G`
    fn schur(&self, sc: &[Scaling]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.m, self.m);
        for (b, list) in self.parts.iter().enumerate() {
            match &sc[b] {
                Scaling::Psd { gi, .. } => {
                    let n = self.spec[b].side;
                    for (jj, pj) in list.iter().enumerate() {
                        // T = gi A_j gi
                        let mut agi = DMatrix::zeros(n, n);
                        for &(i, j, v) in &pj.full {
                            let row = gi.row(j) * v;
                            let mut target = agi.row_mut(i);
                            target += row;
                        }
                        let t = gi * agi;
                        for pi in &list[..=jj] {
                            let val: f64 = pi.full.iter().map(|&(i, j, v)| v * t[(i, j)]).sum();
                            m[(pi.con, pj.con)] += val;
                            if pi.con != pj.con {
                                m[(pj.con, pi.con)] += val;
                            }
                        }
                    }
                }
                Scaling::Lp { d, .. } => {
                    let inv = d.map(|x| 1.0 / (x * x));
                    for (jj, pj) in list.iter().enumerate() {
                        for pi in &list[..=jj] {
                            let mut val = 0.0;
                            for &(i, _, a) in &pi.full {
                                for &(k, _, b2) in &pj.full {
                                    if i == k {
                                        val += a * b2 * inv[i];
                                    }
                                }
                            }
                            m[(pi.con, pj.con)] += val;
                            if pi.con != pj.con {
                                m[(pj.con, pi.con)] += val;
                            }
                        }
                    }
                }
            }
        }
        m
    }
}

struct Factor {
    m: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl Factor {
    /// Cholesky with static regularization `M_ii += δ·M_ii`, retried with `δ`
    /// growing tenfold from `1e-12` to `1e-8`. Scaling by the diagonal keeps
    /// the shift from swamping rows whose diagonal is small.
    fn new(m: DMatrix<f64>) -> Option<Self> {
        let floor = m.diagonal().iter().copied().fold(0.0, f64::max) * f64::EPSILON;
        let mut delta = 1e-12;
        while delta <= 1e-8 * 1.0001 {
            let mut reg = m.clone();
            for i in 0..reg.nrows() {
                reg[(i, i)] += delta * m[(i, i)].max(floor);
            }
            if let Some(chol) = Cholesky::new(reg) {
                return Some(Factor { m, chol });
            }
            delta *= 10.0;
        }
        None
    }

    /// Solve with two steps of iterative refinement against the unregularized
    /// matrix.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(rhs);
        for _ in 0..2 {
            let r = rhs - &self.m * &x;
            x += self.chol.solve(&r);
        }
        x
    }
}

/// Solves `G'z = p`, `Gx − Hz = q`, refined twice against the full system.
fn kkt(data: &Data, sc: &[Scaling], f: &Factor, p: &DVector<f64>, q: &CVec) -> (DVector<f64>, CVec) {
    let (mut x, mut z) = kkt_once(data, sc, f, p, q);
    for _ in 0..2 {
        let rp = p - data.gt(&z);
        let mut rq = q.clone();
        axpy(&mut rq, -1.0, &data.g(&x));
        let hz: CVec = sc.iter().zip(&z).map(|(w, v)| w.h(v)).collect();
        axpy(&mut rq, 1.0, &hz);
        let (dx, dz) = kkt_once(data, sc, f, &rp, &rq);
        x += dx;
        axpy(&mut z, 1.0, &dz);
    }
    (x, z)
}

fn kkt_once(data: &Data, sc: &[Scaling], f: &Factor, p: &DVector<f64>, q: &CVec) -> (DVector<f64>, CVec) {
    let hq: CVec = sc.iter().zip(q).map(|(s, b)| s.hinv(b)).collect();
    let rhs = p + data.gt(&hq);
    let x = f.solve(&rhs);
    let mut gx = data.g(&x);
    axpy(&mut gx, -1.0, q);
    let z = sc.iter().zip(&gx).map(|(s, b)| s.hinv(b)).collect();
    (x, z)
}

#[derive(Clone)]
struct Iterate {
    x: DVector<f64>,
    s: CVec,
    z: CVec,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: DVector<f64>,
    ds: CVec,
    dz: CVec,
    dtau: f64,
    dkappa: f64,
    /// `W^{-T} ds` and `W dz`
    ds_scaled: CVec,
    dz_scaled: CVec,
}

fn to_sym(b: &Blk, t: f64) -> SymMatrix<f64> {
    match b {
        Blk::Psd(u) => SymMatrix::from_matrix(&(u * t)),
        Blk::Lp(u) => SymMatrix::from_matrix(&DMatrix::from_diagonal(&(u * t))),
    }
}

/// Solves `p` by the interior-point method. Invalid problems are errors;
/// every numerical outcome is a [`SolveStatus`].
pub fn solve(p: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    p.validate()?;
    let data = Data::new(p);
    Ok(run(&data, p.sense(), cfg))
}

/// Merit below which an iterate counts as close to optimal.
const NEAR_MERIT: f64 = 1e3;
/// Merit growth over the best iterate that ends the iteration.
const DEGRADE: f64 = 1e2;

fn run(data: &Data, sense: Sense, cfg: &SolverConfig) -> SdpSolution {
    let spec = &data.spec;
    let e = identity(spec);
    let resx0 = data.c.norm().max(1.0);
    let resz0 = norm(&data.h).max(1.0);

    // Starting point from least-squares problems with identity scaling.
    let id: Vec<Scaling> = spec.iter().map(Scaling::identity).collect();
    let numerical = |it: Option<&Iterate>, iters| finish(data, sense, it, SolveStatus::NumericalFailure, iters, None);
    let Some(f0) = Factor::new(data.schur(&id)) else {
        return numerical(None, 0);
    };
    let (x, mz) = kkt(data, &id, &f0, &DVector::zeros(data.m), &data.h);
    let mut s = scaled(&mz, -1.0);
    let (_, mut z) = kkt(data, &id, &f0, &(-&data.c), &zeros(spec));
    for v in [&mut s, &mut z] {
        let a = max_neg_eig(v);
        if a >= -1e-8 * norm(v).max(1.0) {
            axpy(v, 1.0 + a, &e);
        }
    }
    let mut it = Iterate {
        x,
        s,
        z,
        tau: 1.0,
        kappa: 1.0,
    };

    // Lowest-merit iterate seen so far; returned when the iteration breaks
    // down after having come close to optimality.
    let mut best: Option<(f64, Iterate, usize)> = None;
    let fallback = |best: &Option<(f64, Iterate, usize)>, it: &Iterate, iter: usize| match best {
        Some((m, b, _)) if *m < NEAR_MERIT => finish(data, sense, Some(b), SolveStatus::NumericalFailure, iter, None),
        _ => numerical(Some(it), iter),
    };

    for iter in 0..=cfg.max_iter {
        let gx = data.g(&it.x);
        let gtz = data.gt(&it.z);
        let cx = data.c.dot(&it.x);
        let hz = dot(&data.h, &it.z);
        // rx = G'z + cτ, rz = s + Gx − hτ, rt = κ + c'x + h'z
        let rx = &gtz + &data.c * it.tau;
        let mut rz = it.s.clone();
        axpy(&mut rz, 1.0, &gx);
        axpy(&mut rz, -it.tau, &data.h);
        let rt = it.kappa + cx + hz;
        let sz = dot(&it.s, &it.z);
        let mu = (sz + it.tau * it.kappa) / (data.degree as f64 + 1.0);

        let pobj = hz / it.tau;
        let dobj = -cx / it.tau;
        let pres = rx.norm() / it.tau / resx0;
        let dres = norm(&rz) / it.tau / resz0;
        let relgap = (sz / (it.tau * it.tau)).max((pobj - dobj).abs()) / pobj.abs().max(1.0);
        let merit = (pres.max(dres) / cfg.feas_tol).max(relgap / cfg.gap_tol);
        if best.as_ref().is_none_or(|(m, _, _)| merit < *m) {
            best = Some((merit, it.clone(), iter));
        }
        if pres <= cfg.feas_tol && dres <= cfg.feas_tol && relgap <= cfg.gap_tol {
            return finish(data, sense, Some(&it), SolveStatus::Optimal, iter, None);
        }
        if cx < 0.0 {
            let mut gxs = gx.clone();
            axpy(&mut gxs, 1.0, &it.s);
            if norm(&gxs) / resz0 / (-cx) <= cfg.feas_tol {
                return finish(data, sense, Some(&it), SolveStatus::Infeasible, iter, Some(-cx));
            }
        }
        if hz < 0.0 && gtz.norm() / resx0 / (-hz) <= cfg.feas_tol {
            return finish(data, sense, Some(&it), SolveStatus::Unbounded, iter, Some(-hz));
        }
        if iter == cfg.max_iter {
            return finish(data, sense, Some(&it), SolveStatus::MaxIter, iter, None);
        }
        if let Some((m, _, at)) = &best {
            if *m < NEAR_MERIT && merit > DEGRADE * m && iter > at + 1 {
                return fallback(&best, &it, iter);
            }
        }

        let Some(sc) = it
            .s
            .iter()
            .zip(&it.z)
            .map(|(s, z)| Scaling::nt(s, z))
            .collect::<Option<Vec<_>>>()
        else {
            return fallback(&best, &it, iter);
        };
        let Some(fac) = Factor::new(data.schur(&sc)) else {
            return fallback(&best, &it, iter);
        };
        let (x1, z1) = kkt(data, &sc, &fac, &(-&data.c), &data.h);
        let denom1 = data.c.dot(&x1) + dot(&data.h, &z1) - it.kappa / it.tau;

        let solve_dir = |eta: f64, d_s: &CVec, d_k: f64| -> Direction {
            let bx = &rx * (-eta);
            // bz = −η rz − Wᵀ(λ ⋄\ d_s)
            let wl: CVec = sc.iter().zip(d_s).map(|(w, v)| w.wt(&w.lam_solve(v))).collect();
            let mut bz = scaled(&rz, -eta);
            axpy(&mut bz, -1.0, &wl);
            let bt = -eta * rt - d_k / it.tau;
            let (x2, z2) = kkt(data, &sc, &fac, &bx, &bz);
            let dtau = (bt - data.c.dot(&x2) - dot(&data.h, &z2)) / denom1;
            let dx = x2 + &x1 * dtau;
            let mut dz = z2;
            axpy(&mut dz, dtau, &z1);
            // ds from the linear row `ds + G dx − h dτ = −η rz`, which keeps
            // the residual exact where `Wᵀ(λ ⋄\ d_s) − H dz` would not
            let mut ds = scaled(&rz, -eta);
            axpy(&mut ds, -1.0, &data.g(&dx));
            axpy(&mut ds, dtau, &data.h);
            let dkappa = (d_k - it.kappa * dtau) / it.tau;
            let ds_scaled = sc.iter().zip(&ds).map(|(w, v)| w.winvt(v)).collect();
            let dz_scaled = sc.iter().zip(&dz).map(|(w, v)| w.w(v)).collect();
            Direction {
                dx,
                ds,
                dz,
                dtau,
                dkappa,
                ds_scaled,
                dz_scaled,
            }
        };
        let max_step = |d: &Direction| -> f64 {
            let mut a = f64::INFINITY;
            for (w, (u, v)) in sc.iter().zip(d.ds_scaled.iter().zip(&d.dz_scaled)) {
                a = a.min(w.max_step(u)).min(w.max_step(v));
            }
            if d.dtau < 0.0 {
                a = a.min(-it.tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-it.kappa / d.dkappa);
            }
            a
        };

        let lsq: CVec = sc.iter().map(Scaling::lam_sq).collect();
        let aff = solve_dir(1.0, &scaled(&lsq, -1.0), -it.tau * it.kappa);
        let a_aff = max_step(&aff).min(1.0);
        let sigma = (1.0 - a_aff).powi(3);

        let mut d_s = scaled(&lsq, -1.0);
        axpy(&mut d_s, sigma * mu, &e_scaled(&sc));
        let corr: CVec = aff
            .ds_scaled
            .iter()
            .zip(&aff.dz_scaled)
            .map(|(u, v)| sym_prod(u, v))
            .collect();
        axpy(&mut d_s, -1.0, &corr);
        let d_k = -it.tau * it.kappa + sigma * mu - aff.dtau * aff.dkappa;
        let dir = solve_dir(1.0 - sigma, &d_s, d_k);
        let alpha = (0.99 * max_step(&dir)).min(1.0);
        if !alpha.is_finite() || alpha <= 0.0 {
            return fallback(&best, &it, iter);
        }

        it.x += &dir.dx * alpha;
        axpy(&mut it.s, alpha, &dir.ds);
        axpy(&mut it.z, alpha, &dir.dz);
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;
        for b in it.s.iter_mut().chain(it.z.iter_mut()) {
            if let Blk::Psd(u) = b {
                *u = sym(u.clone());
            }
        }
    }
    unreachable!("the loop returns at max_iter")
}

/// The identity in scaled coordinates, where `λ` is diagonal.
fn e_scaled(sc: &[Scaling]) -> CVec {
    sc.iter()
        .map(|w| match w {
            Scaling::Psd { lam, .. } => Blk::Psd(DMatrix::identity(lam.len(), lam.len())),
            Scaling::Lp { lam, .. } => Blk::Lp(DVector::from_element(lam.len(), 1.0)),
        })
        .collect()
}

fn finish(
    data: &Data,
    sense: Sense,
    it: Option<&Iterate>,
    status: SolveStatus,
    iterations: usize,
    ray_scale: Option<f64>,
) -> SdpSolution {
    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let empty = SdpSolution {
        status,
        primal: data.spec.iter().map(|b| SymMatrix::zeros(b.side)).collect(),
        dual: vec![0.0; data.m],
        slack: data.spec.iter().map(|b| SymMatrix::zeros(b.side)).collect(),
        primal_objective: f64::NAN,
        dual_objective: f64::NAN,
        gap: f64::NAN,
        primal_residual: f64::NAN,
        dual_residual: f64::NAN,
        iterations,
        farkas: None,
        improving_ray: None,
    };
    let Some(it) = it else {
        return empty;
    };
    let t = it.tau;
    let gx = data.g(&it.x);
    let rx = data.gt(&it.z) + &data.c * t;
    let mut rz = it.s.clone();
    axpy(&mut rz, 1.0, &gx);
    axpy(&mut rz, -t, &data.h);
    let pobj = dot(&data.h, &it.z) / t;
    let dobj = -data.c.dot(&it.x) / t;
    let sz = dot(&it.s, &it.z) / (t * t);
    let mut sol = SdpSolution {
        primal: it.z.iter().map(|b| to_sym(b, 1.0 / t)).collect(),
        dual: it.x.iter().map(|v| sign * v / t).collect(),
        slack: it.s.iter().map(|b| to_sym(b, 1.0 / t)).collect(),
        primal_objective: sign * pobj,
        dual_objective: sign * dobj,
        gap: sz.max((pobj - dobj).abs()) / pobj.abs().max(1.0),
        primal_residual: rx.norm() / t / data.c.norm().max(1.0),
        dual_residual: norm(&rz) / t / norm(&data.h).max(1.0),
        ..empty
    };
    match (status, ray_scale) {
        (SolveStatus::Infeasible, Some(k)) => {
            sol.farkas = Some(it.x.iter().map(|v| v / k).collect());
        }
        (SolveStatus::Unbounded, Some(k)) => {
            sol.improving_ray = Some(it.z.iter().map(|b| to_sym(b, 1.0 / k)).collect());
        }
        _ => {}
    }
    sol
}
