//! Small dense semidefinite programs.
//!
//! Problems are stated over a real variable vector `s`:
//!
//! ```text
//! maximize    objective · s
//! subject to  C_k + Σ_i s_i A_{k,i} ⪰ 0     for every block k
//!             row · s = rhs                  (equalities)
//!             row · s ≤ rhs                  (inequalities)
//! ```
//!
//! Complex Hermitian blocks are embedded as real symmetric blocks of twice
//! the size. The solver is an infeasible primal-dual interior point method
//! with the HKM search direction and Mehrotra predictor-corrector steps.
//! The Schur complement is assembled per connected group of variables, so
//! problems made of many independent blocks coupled only by a few linear
//! equalities stay cheap.

use nalgebra::linalg::Cholesky;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::linalg::{real_embedding, ComplexMatrix};
use crate::error::{invalid, Result};

/// One linear matrix inequality `constant + Σ s_i · term_i ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LmiBlock {
    pub dim: usize,
    pub constant: ComplexMatrix,
    pub terms: Vec<(usize, ComplexMatrix)>,
}

impl LmiBlock {
    pub fn new(dim: usize) -> Self {
        Self { dim, constant: ComplexMatrix::zeros(dim, dim), terms: Vec::new() }
    }

    pub fn with_constant(constant: ComplexMatrix) -> Self {
        Self { dim: constant.nrows(), constant, terms: Vec::new() }
    }

    /// Builds a block from real symmetric data.
    pub fn real(constant: &DMatrix<f64>, terms: Vec<(usize, DMatrix<f64>)>) -> Self {
        let cplx = |m: &DMatrix<f64>| m.map(|x| nalgebra::Complex::new(x, 0.0));
        Self {
            dim: constant.nrows(),
            constant: cplx(constant),
            terms: terms.iter().map(|(i, m)| (*i, cplx(m))).collect(),
        }
    }

    pub fn add_term(&mut self, var: usize, matrix: ComplexMatrix) {
        self.terms.push((var, matrix));
    }
}

/// A linear constraint `coeffs · s (= or ≤) rhs` with a dense row.
#[derive(Clone, Debug)]
pub struct LinearConstraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    /// Row with the given sparse entries in a problem of `m` variables.
    pub fn sparse(m: usize, entries: &[(usize, f64)], rhs: f64) -> Self {
        let mut coeffs = vec![0.0; m];
        for &(i, v) in entries {
            coeffs[i] += v;
        }
        Self { coeffs, rhs }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    pub equalities: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
}

impl SdpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![0.0; num_vars], ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    /// Stopped on numerical trouble, but the best iterate meets the looser
    /// `acceptable` threshold.
    NearOptimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub objective: f64,
    pub variables: Vec<f64>,
    /// Relative duality gap at termination.
    pub duality_gap: f64,
    /// Relative residual of the user constraints (blocks and equalities).
    pub constraint_residual: f64,
    /// Relative residual of the dual equations.
    pub dual_residual: f64,
    /// Smallest eigenvalue over all blocks evaluated at `variables`.
    pub min_eigenvalue: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        matches!(self.status, SdpStatus::Optimal | SdpStatus::NearOptimal)
    }
}

#[derive(Clone, Debug)]
pub struct SdpSettings {
    pub tol: f64,
    /// Residual level at which a stalled run still reports its best iterate.
    pub acceptable: f64,
    pub max_iterations: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tol: 1e-8, acceptable: 1e-6, max_iterations: 150 }
    }
}

/// Solves `p` to relative accuracy `tol`.
pub fn sdp_solve(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    sdp_solve_with(p, &SdpSettings { tol, acceptable: tol.max(1e-6), ..Default::default() })
}

pub fn sdp_solve_with(p: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution> {
    let canon = Canonical::build(p)?;
    let mut sol = match canon.eq_inconsistent {
        true => infeasible_solution(p.num_vars),
        false => Ipm::new(&canon, settings).run(),
    };
    if sol.status != SdpStatus::Infeasible {
        sol.min_eigenvalue = min_block_eigenvalue(&canon, &sol.variables);
    }
    Ok(sol)
}

fn infeasible_solution(m: usize) -> SdpSolution {
    SdpSolution {
        status: SdpStatus::Infeasible,
        objective: f64::NEG_INFINITY,
        variables: vec![0.0; m],
        duality_gap: f64::NAN,
        constraint_residual: f64::NAN,
        dual_residual: f64::NAN,
        min_eigenvalue: f64::NAN,
        iterations: 0,
    }
}

/// Internal form: maximize bᵀy s.t. Z = C − Σ y_i A_i ⪰ 0 and E y = f.
struct Canonical {
    m: usize,
    b: DVector<f64>,
    blocks: Vec<Blk>,
    e: DMatrix<f64>,
    f: DVector<f64>,
    eq_inconsistent: bool,
    /// Variable groups that share no block; the Schur matrix is block diagonal over them.
    groups: Vec<Vec<usize>>,
    /// (group, position in group) for each variable.
    slot: Vec<(usize, usize)>,
}

struct Blk {
    n: usize,
    c: DMatrix<f64>,
    vars: Vec<usize>,
    mats: Vec<DMatrix<f64>>,
}

impl Canonical {
    fn build(p: &SdpProblem) -> Result<Self> {
        let m = p.num_vars;
        if m == 0 {
            return Err(invalid("SDP needs at least one variable"));
        }
        if p.objective.len() != m {
            return Err(invalid("objective length differs from variable count"));
        }
        let mut blocks = Vec::new();
        for (k, blk) in p.blocks.iter().enumerate() {
            blocks.push(convert_block(k, blk, m)?);
        }
        for (k, row) in p.inequalities.iter().enumerate() {
            if row.coeffs.len() != m {
                return Err(invalid(format!("inequality {k} has wrong length")));
            }
            let mut vars = Vec::new();
            let mut mats = Vec::new();
            for (i, &v) in row.coeffs.iter().enumerate() {
                if v != 0.0 {
                    vars.push(i);
                    mats.push(DMatrix::from_element(1, 1, v));
                }
            }
            blocks.push(Blk { n: 1, c: DMatrix::from_element(1, 1, row.rhs), vars, mats });
        }
        let (e, f, eq_inconsistent) = reduce_equalities(&p.equalities, m)?;

        let mut uf = UnionFind::new(m);
        let mut covered = vec![false; m];
        for blk in &blocks {
            for &v in &blk.vars {
                covered[v] = true;
                uf.union(blk.vars[0], v);
            }
        }
        if let Some(v) = covered.iter().position(|&c| !c) {
            return Err(invalid(format!("variable {v} appears in no matrix block or inequality")));
        }
        let mut root_group = vec![usize::MAX; m];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![(0, 0); m];
        for v in 0..m {
            let r = uf.find(v);
            if root_group[r] == usize::MAX {
                root_group[r] = groups.len();
                groups.push(Vec::new());
            }
            let g = root_group[r];
            slot[v] = (g, groups[g].len());
            groups[g].push(v);
        }
        Ok(Self { m, b: DVector::from_column_slice(&p.objective), blocks, e, f, eq_inconsistent, groups, slot })
    }
}

fn convert_block(k: usize, blk: &LmiBlock, m: usize) -> Result<Blk> {
    let n = blk.dim;
    if n == 0 || blk.constant.nrows() != n || blk.constant.ncols() != n {
        return Err(invalid(format!("block {k}: constant has wrong shape")));
    }
    let is_complex = std::iter::once(&blk.constant)
        .chain(blk.terms.iter().map(|(_, t)| t))
        .any(|t| t.iter().any(|z| z.im != 0.0));
    let conv = |t: &ComplexMatrix| -> DMatrix<f64> {
        let r = if is_complex { real_embedding(t) } else { t.map(|z| z.re) };
        (&r + r.transpose()) * 0.5
    };
    let mut vars: Vec<usize> = Vec::new();
    let mut mats: Vec<DMatrix<f64>> = Vec::new();
    for (i, t) in &blk.terms {
        if *i >= m {
            return Err(invalid(format!("block {k}: variable index {i} out of range")));
        }
        if t.nrows() != n || t.ncols() != n {
            return Err(invalid(format!("block {k}: term for variable {i} has wrong shape")));
        }
        let a = -conv(t);
        match vars.iter().position(|v| v == i) {
            Some(pos) => mats[pos] += a,
            None => {
                vars.push(*i);
                mats.push(a);
            }
        }
    }
    let c = conv(&blk.constant);
    Ok(Blk { n: c.nrows(), c, vars, mats })
}

/// Replaces the equality rows by an orthonormal set spanning the same row space.
fn reduce_equalities(rows: &[LinearConstraint], m: usize) -> Result<(DMatrix<f64>, DVector<f64>, bool)> {
    if rows.is_empty() {
        return Ok((DMatrix::zeros(0, m), DVector::zeros(0), false));
    }
    let p = rows.len();
    let mut e = DMatrix::zeros(p, m);
    let mut f = DVector::zeros(p);
    for (r, row) in rows.iter().enumerate() {
        if row.coeffs.len() != m {
            return Err(invalid(format!("equality {r} has wrong length")));
        }
        for (i, &v) in row.coeffs.iter().enumerate() {
            e[(r, i)] = v;
        }
        f[r] = row.rhs;
    }
    // Row space from the SVD of E; squaring into E Eᵀ would blur the small
    // singular values and keep rows that are dependent in exact arithmetic.
    let svd = e.clone().svd(true, true);
    let (u, vt) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
    let top = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let cut = 1e-10 * top * (p.max(m) as f64).sqrt();
    let mut new_rows = Vec::new();
    let mut new_rhs = Vec::new();
    let mut explained = DVector::zeros(p);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if top > 0.0 && s > cut {
            let uk = u.column(k);
            let ut_f = uk.dot(&f);
            explained += uk * ut_f;
            new_rows.push(vt.row(k).transpose());
            new_rhs.push(ut_f / s);
        }
    }
    let inconsistent = (&f - &explained).norm() > 1e-9 * (1.0 + f.norm());
    let r = new_rows.len();
    let mut er = DMatrix::zeros(r, m);
    for (k, v) in new_rows.iter().enumerate() {
        er.set_row(k, &v.transpose());
    }
    Ok((er, DVector::from_vec(new_rhs), inconsistent))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn min_block_eigenvalue(canon: &Canonical, y: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    for blk in &canon.blocks {
        let mut z = blk.c.clone();
        for (v, a) in blk.vars.iter().zip(&blk.mats) {
            z -= a * y[*v];
        }
        let ev = z.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        lo = lo.min(ev);
    }
    lo
}

type Mats = Vec<DMatrix<f64>>;

struct Best {
    merit: f64,
    iter: usize,
    y: DVector<f64>,
    metrics: (f64, f64, f64),
}

struct Ipm<'a> {
    p: &'a Canonical,
    settings: &'a SdpSettings,
    x: Mats,
    z: Mats,
    y: DVector<f64>,
    w: DVector<f64>,
}

struct Factored {
    chol: Vec<Cholesky<f64, nalgebra::Dyn>>,
    /// M⁻¹ Eᵀ, columns indexed by equality row.
    minv_et: DMatrix<f64>,
    schur_eq: Option<Cholesky<f64, nalgebra::Dyn>>,
}

struct Direction {
    dx: Mats,
    dz: Mats,
    dy: DVector<f64>,
    dw: DVector<f64>,
}

impl<'a> Ipm<'a> {
    fn new(p: &'a Canonical, settings: &'a SdpSettings) -> Self {
        let mut x = Vec::new();
        let mut z = Vec::new();
        for blk in &p.blocks {
            let n = blk.n as f64;
            let mut max_a = 0.0_f64;
            let mut ratio = 0.0_f64;
            for (v, a) in blk.vars.iter().zip(&blk.mats) {
                let na = a.norm();
                max_a = max_a.max(na);
                ratio = ratio.max((1.0 + p.b[*v].abs()) / (1.0 + na));
            }
            let xi = 10.0_f64.max(n.sqrt()).max(n.sqrt() * ratio);
            let eta = 10.0_f64.max(n.sqrt()).max(max_a).max(blk.c.norm());
            x.push(DMatrix::identity(blk.n, blk.n) * xi);
            z.push(DMatrix::identity(blk.n, blk.n) * eta);
        }
        Self { p, settings, x, z, y: DVector::zeros(p.m), w: DVector::zeros(p.e.nrows()) }
    }

    fn a_op(&self, g: &Mats) -> DVector<f64> {
        let mut out = DVector::zeros(self.p.m);
        for (blk, gk) in self.p.blocks.iter().zip(g) {
            for (v, a) in blk.vars.iter().zip(&blk.mats) {
                out[*v] += a.dot(gk);
            }
        }
        out
    }

    fn a_adj(&self, y: &DVector<f64>) -> Mats {
        self.p
            .blocks
            .iter()
            .map(|blk| {
                let mut s = DMatrix::zeros(blk.n, blk.n);
                for (v, a) in blk.vars.iter().zip(&blk.mats) {
                    if y[*v] != 0.0 {
                        s += a * y[*v];
                    }
                }
                s
            })
            .collect()
    }

    fn run(mut self) -> SdpSolution {
        let p = self.p;
        let tol = self.settings.tol;
        let n_total: f64 = p.blocks.iter().map(|b| b.n as f64).sum();
        let norm_b = p.b.norm();
        let norm_c = p.blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();
        let norm_f = p.f.norm();
        let mut stalls = 0;
        let mut last = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut best: Option<Best> = None;
        for iter in 0..self.settings.max_iterations {
            let zinv = match invert_all(&self.z) {
                Some(v) => v,
                None => return self.fallback(best, iter, last),
            };
            let ax = self.a_op(&self.x);
            let etw = p.e.transpose() * &self.w;
            let rp = &p.b - &ax - &etw;
            let aty = self.a_adj(&self.y);
            let rd: Mats = p.blocks.iter().zip(&aty).zip(&self.z).map(|((blk, s), z)| &blk.c - s - z).collect();
            let re = &p.f - &p.e * &self.y;
            let xz: f64 = self.x.iter().zip(&self.z).map(|(x, z)| x.dot(z)).sum();
            let mu = xz / n_total;
            let pobj: f64 = p.blocks.iter().zip(&self.x).map(|(b, x)| b.c.dot(x)).sum::<f64>() + p.f.dot(&self.w);
            let dobj = p.b.dot(&self.y);

            let denom = 1.0 + pobj.abs() + dobj.abs();
            let gap = (pobj - dobj).abs().max(xz) / denom;
            let pinf = rp.norm() / (1.0 + norm_b);
            let rd_norm = rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt();
            let dinf = (rd_norm * rd_norm + re.norm_squared()).sqrt() / (1.0 + norm_c + norm_f);
            last = (gap, dinf, pinf);
            let merit = gap.max(dinf).max(pinf);
            if best.as_ref().is_none_or(|b| merit < b.merit) {
                best = Some(Best { merit, iter, y: self.y.clone(), metrics: last });
            } else if best.as_ref().is_some_and(|b| iter - b.iter >= 20 && b.merit <= self.settings.acceptable) {
                return self.fallback(best, iter, last);
            }
            if gap <= tol && pinf <= tol && dinf <= tol {
                return self.finish(SdpStatus::Optimal, iter, last);
            }
            // Farkas ray for the user problem: 𝒜X + Eᵀw ≈ 0 with ⟨C,X⟩ + fᵀw < 0.
            if pobj < 0.0 && (&ax + &etw).norm() <= 1e-9 * (-pobj) && -pobj > 1e3 * (1.0 + norm_b) {
                return self.finish(SdpStatus::Infeasible, iter, last);
            }
            if !dobj.is_finite() || dobj.abs() > 1e12 * (1.0 + norm_b) {
                return self.fallback(best, iter, last);
            }

            let fact = match self.factor(&zinv) {
                Some(f) => f,
                None => return self.fallback(best, iter, last),
            };
            let xrdz: Mats = self.x.iter().zip(&rd).zip(&zinv).map(|((x, r), zi)| x * r * zi).collect();
            let a_xrdz = self.a_op(&sym_all(&xrdz));

            // Predictor.
            let h_aff = &rp + &ax + &a_xrdz;
            let aff = self.direction(&fact, &zinv, &rd, &re, &h_aff, 0.0, None);
            let ap_aff = max_step_all(&self.x, &aff.dx).min(1.0);
            let ad_aff = max_step_all(&self.z, &aff.dz).min(1.0);
            let xz_aff: f64 = self
                .x
                .iter()
                .zip(&aff.dx)
                .zip(self.z.iter().zip(&aff.dz))
                .map(|((x, dx), (z, dz))| (x + dx * ap_aff).dot(&(z + dz * ad_aff)))
                .sum();
            let sigma = (xz_aff / xz).clamp(0.0, 1.0).powi(3);

            // Corrector with the second-order term ΔX_aff ΔZ_aff.
            let tau = sigma * mu;
            let k: Mats = aff.dx.iter().zip(&aff.dz).map(|(dx, dz)| dx * dz).collect();
            let kzinv: Mats = k.iter().zip(&zinv).map(|(k, zi)| k * zi).collect();
            let target: Mats = zinv
                .iter()
                .zip(&self.x)
                .zip(&kzinv)
                .map(|((zi, x), kz)| zi * tau - x - sym(kz))
                .collect();
            let h = &rp - self.a_op(&target) + &a_xrdz;
            let dir = self.direction(&fact, &zinv, &rd, &re, &h, tau, Some(&kzinv));

            let gamma = 0.9 + 0.09 * ap_aff.min(ad_aff);
            let ap = (gamma * max_step_all(&self.x, &dir.dx)).min(1.0);
            let ad = (gamma * max_step_all(&self.z, &dir.dz)).min(1.0);
            for (x, dx) in self.x.iter_mut().zip(&dir.dx) {
                *x += dx * ap;
            }
            self.w += &dir.dw * ap;
            for (z, dz) in self.z.iter_mut().zip(&dir.dz) {
                *z += dz * ad;
            }
            self.y += &dir.dy * ad;
            if ap < 1e-9 && ad < 1e-9 {
                stalls += 1;
                if stalls >= 3 {
                    return self.fallback(best, iter, last);
                }
            } else {
                stalls = 0;
            }
        }
        self.fallback(best, self.settings.max_iterations, last)
    }

    /// Best iterate if it meets the acceptable level, otherwise a failure at the current one.
    fn fallback(&mut self, best: Option<Best>, iter: usize, last: (f64, f64, f64)) -> SdpSolution {
        match best {
            Some(b) if b.merit <= self.settings.acceptable => {
                self.y = b.y;
                self.finish(SdpStatus::NearOptimal, iter, b.metrics)
            }
            _ => self.finish(SdpStatus::NumericalFailure, iter, last),
        }
    }

    fn finish(&self, status: SdpStatus, iterations: usize, metrics: (f64, f64, f64)) -> SdpSolution {
        let (gap, dinf, pinf) = metrics;
        let objective = match status {
            SdpStatus::Infeasible => f64::NEG_INFINITY,
            _ => self.p.b.dot(&self.y),
        };
        SdpSolution {
            status,
            objective,
            variables: self.y.iter().copied().collect(),
            duality_gap: gap,
            constraint_residual: dinf,
            dual_residual: pinf,
            min_eigenvalue: f64::NAN,
            iterations,
        }
    }

    /// Assembles and factors the Schur complement M_ij = Σ tr(A_i X A_j Z⁻¹).
    fn factor(&self, zinv: &Mats) -> Option<Factored> {
        let p = self.p;
        let mut mg: Vec<DMatrix<f64>> = p.groups.iter().map(|g| DMatrix::zeros(g.len(), g.len())).collect();
        for ((blk, x), zi) in p.blocks.iter().zip(&self.x).zip(zinv) {
            let k = blk.vars.len();
            if k == 0 {
                continue;
            }
            let g = p.slot[blk.vars[0]].0;
            let local: Vec<usize> = blk.vars.iter().map(|v| p.slot[*v].1).collect();
            if blk.n == 1 {
                let s = x[(0, 0)] * zi[(0, 0)];
                for i in 0..k {
                    for j in 0..=i {
                        let val = blk.mats[i][(0, 0)] * blk.mats[j][(0, 0)] * s;
                        mg[g][lower(local[i], local[j])] += val;
                    }
                }
                continue;
            }
            for i in 0..k {
                let pi = x * &blk.mats[i] * zi;
                for j in 0..=i {
                    let val = pi.dot(&blk.mats[j]);
                    mg[g][lower(local[i], local[j])] += val;
                }
            }
        }
        let mut chol = Vec::with_capacity(mg.len());
        for mut mat in mg {
            let n = mat.nrows();
            for i in 0..n {
                for j in 0..i {
                    mat[(j, i)] = mat[(i, j)];
                }
            }
            chol.push(robust_cholesky(mat)?);
        }
        let q = p.e.nrows();
        let mut minv_et = DMatrix::zeros(p.m, q);
        for r in 0..q {
            let col = self.solve_m(&chol, &p.e.row(r).transpose());
            minv_et.set_column(r, &col);
        }
        let schur_eq = if q > 0 { Some(robust_cholesky(&p.e * &minv_et)?) } else { None };
        Some(Factored { chol, minv_et, schur_eq })
    }

    fn solve_m(&self, chol: &[Cholesky<f64, nalgebra::Dyn>], rhs: &DVector<f64>) -> DVector<f64> {
        let p = self.p;
        let mut out = DVector::zeros(p.m);
        for (g, vars) in p.groups.iter().enumerate() {
            let local = DVector::from_iterator(vars.len(), vars.iter().map(|v| rhs[*v]));
            let sol = chol[g].solve(&local);
            for (k, v) in vars.iter().enumerate() {
                out[*v] = sol[k];
            }
        }
        out
    }

    /// Solves M·dy + Eᵀ·dw = h, E·dy = re with the factored Schur complements.
    fn solve_kkt(&self, fact: &Factored, h: &DVector<f64>, re: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let minv_h = self.solve_m(&fact.chol, h);
        match &fact.schur_eq {
            Some(s) => {
                let rhs = &self.p.e * &minv_h - re;
                let dw = s.solve(&rhs);
                (minv_h - &fact.minv_et * &dw, dw)
            }
            None => (minv_h, DVector::zeros(0)),
        }
    }

    /// M·v with M_ij = tr(A_i X A_j Z⁻¹).
    fn apply_m(&self, zinv: &Mats, v: &DVector<f64>) -> DVector<f64> {
        let av = self.a_adj(v);
        let g: Mats = self.x.iter().zip(&av).zip(zinv).map(|((x, a), zi)| sym(&(x * a * zi))).collect();
        self.a_op(&g)
    }

    /// Solves the Newton system for right-hand side `h` and returns the full step.
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        fact: &Factored,
        zinv: &Mats,
        rd: &Mats,
        re: &DVector<f64>,
        h: &DVector<f64>,
        tau: f64,
        kzinv: Option<&Mats>,
    ) -> Direction {
        let p = self.p;
        let (mut dy, mut dw) = self.solve_kkt(fact, h, re);
        // Two rounds of iterative refinement against the unregularized system.
        for _ in 0..2 {
            let r1 = h - self.apply_m(zinv, &dy) - p.e.transpose() * &dw;
            let r2 = re - &p.e * &dy;
            let (cy, cw) = self.solve_kkt(fact, &r1, &r2);
            dy += cy;
            dw += cw;
        }
        let ady = self.a_adj(&dy);
        let dz: Mats = rd.iter().zip(&ady).map(|(r, a)| r - a).collect();
        let dx: Mats = (0..p.blocks.len())
            .map(|k| {
                let mut d = &zinv[k] * tau - &self.x[k] - sym(&(&self.x[k] * &dz[k] * &zinv[k]));
                if let Some(kz) = kzinv {
                    d -= sym(&kz[k]);
                }
                d
            })
            .collect();
        Direction { dx, dz, dy, dw }
    }
}

/// Index into the lower triangle; blocks need not list their variables in order.
fn lower(i: usize, j: usize) -> (usize, usize) {
    if i >= j {
        (i, j)
    } else {
        (j, i)
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn sym_all(ms: &Mats) -> Mats {
    ms.iter().map(sym).collect()
}

fn invert_all(z: &Mats) -> Option<Mats> {
    z.iter()
        .map(|m| {
            let ch = Cholesky::new(m.clone())?;
            Some(sym(&ch.inverse()))
        })
        .collect()
}

fn robust_cholesky(mat: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(ch) = Cholesky::new(mat.clone()) {
        return Some(ch);
    }
    let n = mat.nrows();
    let scale = (0..n).map(|i| mat[(i, i)].abs()).fold(0.0_f64, f64::max).max(1e-300);
    let mut reg = 1e-14;
    while reg < 1e-4 {
        let mut m = mat.clone();
        for i in 0..n {
            m[(i, i)] += reg * scale;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Some(ch);
        }
        reg *= 100.0;
    }
    None
}

/// Largest α with X + α·dX ⪰ 0 (infinite if dX ⪰ 0).
fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    if x.nrows() == 1 {
        return if dx[(0, 0)] < 0.0 { -x[(0, 0)] / dx[(0, 0)] } else { f64::INFINITY };
    }
    let ch = match Cholesky::new(x.clone()) {
        Some(c) => c,
        None => return 0.0,
    };
    let l = ch.l();
    let linv = match l.clone().try_inverse() {
        Some(v) => v,
        None => return 0.0,
    };
    let m = sym(&(&linv * dx * linv.transpose()));
    let lo = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    if lo < 0.0 {
        -1.0 / lo
    } else {
        f64::INFINITY
    }
}

fn max_step_all(x: &Mats, dx: &Mats) -> f64 {
    x.iter().zip(dx).map(|(a, b)| max_step(a, b)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Complex;

    fn real_block(c: &[f64], n: usize, terms: &[(usize, &[f64])]) -> LmiBlock {
        LmiBlock::real(
            &DMatrix::from_row_slice(n, n, c),
            terms.iter().map(|(i, t)| (*i, DMatrix::from_row_slice(n, n, t))).collect(),
        )
    }

    #[test]
    fn scalar_bound() {
        // maximize s subject to 1 - s ≥ 0
        let mut p = SdpProblem::new(1);
        p.objective[0] = 1.0;
        p.blocks.push(real_block(&[1.0], 1, &[(0, &[-1.0])]));
        let sol = sdp_solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8, "{}", sol.objective);
    }

    #[test]
    fn largest_eigenvalue_via_trace_constraint() {
        // X = [[a, b], [b, c]], maximize tr(diag(1,-1) X) with tr X = 1.
        let mut p = SdpProblem::new(3);
        p.objective = vec![1.0, 0.0, -1.0];
        p.blocks.push(real_block(
            &[0.0; 4],
            2,
            &[(0, &[1.0, 0.0, 0.0, 0.0]), (1, &[0.0, 1.0, 1.0, 0.0]), (2, &[0.0, 0.0, 0.0, 1.0])],
        ));
        p.equalities.push(LinearConstraint::new(vec![1.0, 0.0, 1.0], 1.0));
        let sol = sdp_solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-8);
    }

    #[test]
    fn complex_block_top_eigenvalue() {
        // maximize t subject to Y - t·I ⪰ 0 → t = −1 for Pauli Y.
        let mut p = SdpProblem::new(1);
        p.objective[0] = 1.0;
        let y = ComplexMatrix::from_row_slice(
            2,
            2,
            &[Complex::new(0., 0.), Complex::new(0., -1.), Complex::new(0., 1.), Complex::new(0., 0.)],
        );
        let mut blk = LmiBlock::with_constant(y);
        blk.add_term(0, -ComplexMatrix::identity(2, 2));
        p.blocks.push(blk);
        let sol = sdp_solve(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-8);
    }

    #[test]
    fn detects_infeasibility() {
        // s ≥ 2 and s ≤ 1.
        let mut p = SdpProblem::new(1);
        p.objective[0] = 1.0;
        p.blocks.push(real_block(&[-2.0], 1, &[(0, &[1.0])]));
        p.inequalities.push(LinearConstraint::new(vec![1.0], 1.0));
        let sol = sdp_solve(&p, 1e-8).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn inconsistent_equalities_are_infeasible() {
        let mut p = SdpProblem::new(1);
        p.blocks.push(real_block(&[1.0], 1, &[(0, &[-1.0])]));
        p.equalities.push(LinearConstraint::new(vec![1.0], 0.0));
        p.equalities.push(LinearConstraint::new(vec![2.0], 1.0));
        assert_eq!(sdp_solve(&p, 1e-8).unwrap().status, SdpStatus::Infeasible);
    }
}
