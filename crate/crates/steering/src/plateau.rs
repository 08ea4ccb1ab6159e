//! Imprecision plateaus: closed forms for the elegant inequality, the
//! operator lemma bound, a first-order expansion of the plateau surface,
//! and two brute-force oracles (a Bloch-sphere grid and a seesaw).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, numerical, Result};
use crate::numerics::linalg::{c, eig_max, ComplexVector, HermitianOperator};
use crate::quantum::{random_state_vector, ImprecisionSpec, Observable};
use crate::table::{sig12, Table};
use crate::witness::{distinct_strategies, StrategyClass, Witness};

/// Upper end of the domain of [`f_eps`], where it peaks at 3/2.
pub fn f_eps_domain_max() -> f64 {
    (3.0 - 3f64.sqrt()) / 6.0
}

/// Largest value of ⟨B₁+B₂+B₃⟩/2 over ε-imprecise Paulis and qubit states.
pub fn f_eps(eps: f64) -> Result<f64> {
    if !(0.0..=f_eps_domain_max() + 1e-15).contains(&eps) {
        return Err(invalid(format!("ε = {eps} outside [0, (3−√3)/6]")));
    }
    Ok(3f64.sqrt() / 2.0 * (1.0 + 2.0 * (2.0 * eps * (1.0 - eps)).sqrt() - 2.0 * eps))
}

/// Four-target family analogue with rank-2 targets: f̃(ε) = √3/2 + √6·√(2ε(1−2ε)) − 2√3ε.
pub fn f_tilde(eps: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&eps) {
        return Err(invalid(format!("ε = {eps} outside [0, 1/2]")));
    }
    let s3 = 3f64.sqrt();
    Ok(s3 / 2.0 + 6f64.sqrt() * (2.0 * eps * (1.0 - 2.0 * eps)).sqrt() - 2.0 * s3 * eps)
}

/// ε* = (9 − 2√3 − √30)/18 ≈ 3.2596×10⁻³, the root of f(ε) = 1.
pub fn epsilon_star_esi() -> f64 {
    (9.0 - 2.0 * 3f64.sqrt() - 30f64.sqrt()) / 18.0
}

/// Equivalent form 1/2 − 1/(3√3) − (1/3)√(5/6).
pub fn epsilon_star_esi_alt() -> f64 {
    0.5 - 1.0 / (3.0 * 3f64.sqrt()) - (5.0f64 / 6.0).sqrt() / 3.0
}

/// Cauchy–Schwarz bound √(3(1+ε̄))/2 under the anticommutator quantifier.
pub fn anticommutator_bound(eps_bar: f64) -> f64 {
    (3.0 * (1.0 + eps_bar)).sqrt() / 2.0
}

/// Plateau length ε̄* = 1/3 for the anticommutator quantifier.
pub fn anticommutator_plateau() -> f64 {
    bisect_plateau(anticommutator_bound, 1.0, 0.0, 1.0, 1e-14)
}

/// Operator bound B_{b|y} ⪯ scale·B^targ_{b|y} + shift·I for rank-r targets.
pub fn lemma_operator_bound(eps: f64, mu: f64, r: usize) -> Result<(f64, f64)> {
    if mu < -1.0 {
        return Err(invalid(format!("μ = {mu} < −1")));
    }
    if !(0.0..=1.0).contains(&eps) || r == 0 {
        return Err(invalid("ε must lie in [0, 1] and r ≥ 1"));
    }
    Ok((1.0 + mu, lemma_shift(eps, mu, r)))
}

fn lemma_shift(eps: f64, mu: f64, r: usize) -> f64 {
    ((mu * mu + 4.0 * r as f64 * eps * (1.0 + mu)).max(0.0).sqrt() - mu) / 2.0
}

/// μ that makes the lemma reproduce f(ε) for rank-1 targets.
pub fn mu_opt(eps: f64) -> f64 {
    -2.0 * eps - 2f64.sqrt() * (eps * (1.0 - eps)).sqrt()
}

/// Rank of the target projectors, d/2 for traceless targets.
fn target_rank(w: &Witness) -> usize {
    (w.dim() / 2).max(1)
}

/// Lemma bound of one strategy for fixed per-setting μ:
/// t₀ + λ_max(Σ t_y(1+μ_y)B_y) + Σ|t_y|·√(μ_y² + 4rε(1+μ_y)).
pub fn lemma_strategy_value(w: &Witness, t: &[f64], t0: f64, mu: &[f64], spec: &ImprecisionSpec) -> f64 {
    let r = target_rank(w) as f64;
    let scaled: Vec<f64> = t.iter().zip(mu).map(|(ty, m)| ty * (1.0 + m)).collect();
    let mut v = t0 + eig_max(&w.strategy_operator(&scaled, 0.0)).0;
    for (y, (ty, m)) in t.iter().zip(mu).enumerate() {
        if *ty == 0.0 {
            continue;
        }
        let eps = if *ty > 0.0 { spec.get(0, y) } else { spec.get(1, y) };
        v += ty.abs() * (m * m + 4.0 * r * eps * (1.0 + m)).max(0.0).sqrt();
    }
    v
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

/// Lemma bound minimized over per-setting μ_y ∈ [−1, 2] by coordinate golden-section search.
pub fn lemma_bound_t(w: &Witness, t: &[f64], t0: f64, spec: &ImprecisionSpec) -> Result<f64> {
    if spec.n_y() != w.n_y() || t.len() != w.n_y() {
        return Err(invalid("imprecision spec does not match the witness targets"));
    }
    let active: Vec<usize> = (0..t.len()).filter(|&y| t[y] != 0.0).collect();
    let mut mu = vec![0.0; t.len()];
    let mut best = lemma_strategy_value(w, t, t0, &mu, spec);
    for _ in 0..200 {
        let before = best;
        for &y in &active {
            let (m, v) = golden_min(
                |m| {
                    let mut trial = mu.clone();
                    trial[y] = m;
                    lemma_strategy_value(w, t, t0, &trial, spec)
                },
                -1.0,
                2.0,
                1e-12,
            );
            if v < best {
                best = v;
                mu[y] = m;
            }
        }
        if before - best < 1e-14 {
            break;
        }
    }
    Ok(best)
}

/// Lemma bound for a strategy class, evaluated on its representative t-vector.
pub fn lemma_strategy_bound(w: &Witness, class: &StrategyClass, spec: &ImprecisionSpec) -> Result<f64> {
    lemma_bound_t(w, &class.t_vector, class.offset, spec)
}

/// Valid upper bound on the ε-constrained LHS value: the largest per-strategy lemma bound.
pub fn lemma_witness_bound(w: &Witness, spec: &ImprecisionSpec) -> Result<f64> {
    let strategies = distinct_strategies(w)?;
    let values: Result<Vec<f64>> =
        strategies.par_iter().map(|(_, t, t0)| lemma_bound_t(w, t, *t0, spec)).collect();
    Ok(values?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// One μ shared by all settings and strategies: min_μ max_λ of the per-strategy bound.
pub fn lemma_witness_bound_shared(w: &Witness, spec: &ImprecisionSpec) -> Result<f64> {
    let strategies = distinct_strategies(w)?;
    let eval = |m: f64| {
        let mu = vec![m; w.n_y()];
        strategies.iter().map(|(_, t, t0)| lemma_strategy_value(w, t, *t0, &mu, spec)).fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(golden_min(eval, -1.0, 2.0, 1e-12).1)
}

/// First-order expansion of the ε_Z plateau length at given (ε_X, ε_Y).
///
/// Expands the optimal Bloch angles around θ_x = θ_y = π/2, φ_z = π/4. The
/// sine and cosine of φ_z are both taken to first order, which keeps the
/// expression exactly symmetric under X ↔ Y.
pub fn taylor_plateau(eps_x: f64, eps_y: f64) -> Result<f64> {
    if !(0.0..=0.01).contains(&eps_x) || !(0.0..=0.01).contains(&eps_y) {
        return Err(invalid("the expansion is valid for ε_X, ε_Y ∈ [0, 0.01]"));
    }
    let (ex, ey) = (eps_x, eps_y);
    let s2 = 2f64.sqrt();
    let s_z = (1.0 + (ex / 2.0).sqrt() - (ey / 2.0).sqrt()) / s2;
    let c_z = (1.0 - (ex / 2.0).sqrt() + (ey / 2.0).sqrt()) / s2;
    let cx = (ex * (2.0 - ex)).sqrt();
    let cy = (ey * (2.0 - ey)).sqrt();
    let rx = (ex * (2.0 - 3.0 * ex)).sqrt();
    let ry = (ey * (2.0 - 3.0 * ey)).sqrt();
    let e1 = (1.0 - 2.0 * ex) * c_z + (1.0 - 2.0 * ey) * s_z + ry * c_z + rx * s_z;
    let e2 = 1.0 - 2.0 * ((1.0 - 2.0 * ex) * ry + (1.0 - 2.0 * ey) * rx + cx * cy);
    let d1 = (cx + cy).powi(2) + e1 * e1;
    let d2 = (cx + cy) * e2;
    let d3 = e2 * e2 - 4.0 * e1 * e1;
    let disc = d2 * d2 - d1 * d3;
    if disc < 0.0 {
        return Err(numerical(format!("negative discriminant {disc:.3e} at ({ex}, {ey})")));
    }
    Ok(0.5 * (1.0 - (d2 + disc.sqrt()) / (2.0 * d1)))
}

/// max over unit u of Σ_i |w_i|·cos(max(∠(u, ±e_i) − θ_i, 0)), cos θ_i = 1 − 2ε_i.
///
/// Each term is the best overlap a lab Bloch vector inside the cone around the
/// signed axis can have with u; maximizing over u is maximizing over the state.
pub fn grid_oracle(weights: [f64; 3], eps: [f64; 3], resolution: usize) -> f64 {
    let theta: Vec<f64> = eps.iter().map(|e| (1.0 - 2.0 * e).clamp(-1.0, 1.0).acos()).collect();
    let value = |pol: f64, az: f64| {
        let u = [pol.sin() * az.cos(), pol.sin() * az.sin(), pol.cos()];
        let mut v = 0.0;
        for i in 0..3 {
            if weights[i] == 0.0 {
                continue;
            }
            let dot = (weights[i].signum() * u[i]).clamp(-1.0, 1.0);
            v += weights[i].abs() * (dot.acos() - theta[i]).max(0.0).cos();
        }
        v
    };
    let n = resolution.max(3);
    let pi = std::f64::consts::PI;
    let (mut best, mut bp, mut ba) = (f64::NEG_INFINITY, 0.0, 0.0);
    let rows: Vec<(f64, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let pol = pi * i as f64 / (n - 1) as f64;
            let mut row = (f64::NEG_INFINITY, 0.0, 0.0);
            for j in 0..n {
                let az = 2.0 * pi * j as f64 / n as f64;
                let v = value(pol, az);
                if v > row.0 {
                    row = (v, pol, az);
                }
            }
            row
        })
        .collect();
    for (v, p, a) in rows {
        if v > best {
            (best, bp, ba) = (v, p, a);
        }
    }
    // compass refinement around the best grid point
    let mut step = pi / (n - 1) as f64;
    while step > 1e-13 {
        let mut moved = false;
        for (dp, da) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
            let v = value(bp + dp, ba + da);
            if v > best {
                (best, bp, ba) = (v, bp + dp, ba + da);
                moved = true;
            }
        }
        if !moved {
            step /= 2.0;
        }
    }
    best
}

/// Grid oracle for ⟨B₁+B₂+B₃⟩/2 with Pauli targets.
pub fn grid_oracle_class2(spec: &ImprecisionSpec, resolution: usize) -> Result<f64> {
    if spec.n_y() != 3 {
        return Err(invalid("the class-2 oracle needs three targets"));
    }
    let eps = [0, 1, 2].map(|y| spec.get(0, y).min(spec.get(1, y)));
    Ok(grid_oracle([0.5; 3], eps, resolution))
}

/// Best projector P of the same rank as `t` with tr(PT) ≥ rank·(1 − ε), maximizing ⟨ψ|P|ψ⟩.
///
/// The optimum rotates a single vector of T's range toward ψ inside the plane
/// spanned by the two components of ψ, by at most asin(√(rε)).
fn rotate_toward(t: &HermitianOperator, psi: &ComplexVector, eps: f64) -> HermitianOperator {
    let r = t.trace().round().max(1.0);
    let a_vec = t.matrix() * psi;
    let b_vec = psi - &a_vec;
    let (a, b) = (a_vec.norm(), b_vec.norm());
    if b < 1e-14 {
        return t.clone();
    }
    let e = if a > 1e-14 {
        &a_vec / c(a, 0.0)
    } else {
        let (vals, vecs) = t.eigen();
        let k = vals.len() - 1;
        vecs.column(k).into_owned()
    };
    let f = &b_vec / c(b, 0.0);
    let beta = b.atan2(a);
    let alpha = beta.min((r * eps).min(1.0).sqrt().asin());
    let g = &e * c(alpha.cos(), 0.0) + &f * c(alpha.sin(), 0.0);
    let m = t.matrix() - &e * e.adjoint() + &g * g.adjoint();
    HermitianOperator::symmetrized(m)
}

/// Seesaw lower bound on one strategy's ε-constrained value.
pub fn seesaw_strategy(
    w: &Witness,
    t: &[f64],
    t0: f64,
    spec: &ImprecisionSpec,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    if spec.n_y() != w.n_y() || t.len() != w.n_y() {
        return Err(invalid("imprecision spec does not match the witness targets"));
    }
    let d = w.dim();
    if w.targets().iter().any(|b| b.op().trace().abs() > 1e-9) {
        return Err(invalid("seesaw needs traceless targets"));
    }
    let run = |k: usize| -> f64 {
        let mut psi = if k == 0 {
            eig_max(&w.strategy_operator(t, t0)).1
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            random_state_vector(&mut rng, d)
        };
        let mut best = f64::NEG_INFINITY;
        for _ in 0..20000 {
            let mut op = HermitianOperator::identity(d).scale(t0);
            for (y, ty) in t.iter().enumerate() {
                if *ty == 0.0 {
                    continue;
                }
                let b = if *ty > 0.0 { 0 } else { 1 };
                let eps = spec.get(0, y).min(spec.get(1, y));
                let p = rotate_toward(&w.target_projector(b, y), &psi, eps);
                let lab = &p.scale(2.0) - &HermitianOperator::identity(d);
                let lab = if b == 0 { lab } else { lab.scale(-1.0) };
                op = &op + &lab.scale(*ty);
            }
            let (v, vec) = eig_max(&op);
            psi = vec;
            if v - best < 1e-15 {
                best = best.max(v);
                break;
            }
            best = v;
        }
        best
    };
    let values: Vec<f64> = (0..restarts.max(1)).into_par_iter().map(run).collect();
    Ok(values.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Seesaw lower bound on the ε-constrained LHS value, over all distinct strategies.
pub fn seesaw(w: &Witness, spec: &ImprecisionSpec, restarts: usize) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for (i, (_, t, t0)) in distinct_strategies(w)?.iter().enumerate() {
        best = best.max(seesaw_strategy(w, t, *t0, spec, restarts, 1000 * i as u64)?);
    }
    Ok(best)
}

/// Lab observables realizing a seesaw optimum, for inspection.
pub fn seesaw_observables(w: &Witness, t: &[f64], spec: &ImprecisionSpec) -> Result<(f64, Vec<Observable>)> {
    let d = w.dim();
    let mut psi = eig_max(&w.strategy_operator(t, 0.0)).1;
    let mut labs = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..20000 {
        labs.clear();
        let mut op = HermitianOperator::zeros(d);
        for (y, ty) in t.iter().enumerate() {
            let b = if *ty >= 0.0 { 0 } else { 1 };
            let eps = spec.get(0, y).min(spec.get(1, y));
            let p = rotate_toward(&w.target_projector(b, y), &psi, eps);
            let lab = &p.scale(2.0) - &HermitianOperator::identity(d);
            let lab = if b == 0 { lab } else { lab.scale(-1.0) };
            op = &op + &lab.scale(*ty);
            labs.push(Observable::new(lab)?);
        }
        let (v, vec) = eig_max(&op);
        psi = vec;
        if v - best < 1e-15 {
            break;
        }
        best = v;
    }
    Ok((best, labs))
}

/// Per-qubit plateau of the four-target family.
#[derive(Clone, Debug, Serialize)]
pub struct PlateauN4 {
    /// Root of f̃(2ε̃) = 1.
    pub eps_tilde_star: f64,
    /// Same root by bisection.
    pub bisection: f64,
    /// (9 − 3√3)/32, a nearby closed form that does not solve f̃(2ε̃) = 1.
    pub quoted_formula: f64,
}

/// ε̃* = (9 − 2√3 − √30)/72, the per-qubit error where f̃(2ε̃) reaches 1.
pub fn plateau_n4() -> PlateauN4 {
    let closed = epsilon_star_esi() / 4.0;
    let bisection = bisect_plateau(|e| f_tilde(2.0 * e).unwrap_or(f64::INFINITY), 1.0, 0.0, 0.01, 1e-15);
    PlateauN4 { eps_tilde_star: closed, bisection, quoted_formula: (9.0 - 3.0 * 3f64.sqrt()) / 32.0 }
}

/// 1 + 2√(2ε(1−ε)) − 2ε: the ε-constrained LHS bound of the Pauli witness.
pub fn pauli_bound(eps: f64) -> Result<f64> {
    Ok(f_eps(eps)? * 2.0 / 3f64.sqrt())
}

/// Largest ε in [lo, hi] with bound(ε) ≤ β₀, assuming the bound is non-decreasing.
pub fn bisect_plateau(bound: impl Fn(f64) -> f64, beta0: f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    if bound(lo) > beta0 + 1e-12 {
        return lo;
    }
    if bound(hi) <= beta0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= beta0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// How a plateau or bound was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Lemma,
    Taylor,
    Grid,
    Seesaw,
    Sdp,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Lemma => "lemma",
            Method::Taylor => "taylor",
            Method::Grid => "grid",
            Method::Seesaw => "seesaw",
            Method::Sdp => "sdp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "closed-form" => Method::ClosedForm,
            "lemma" => Method::Lemma,
            "taylor" => Method::Taylor,
            "grid" | "grid-oracle" => Method::Grid,
            "seesaw" => Method::Seesaw,
            "sdp" => Method::Sdp,
            other => return Err(invalid(format!("unknown method '{other}'"))),
        })
    }
}

/// One sample of a bound curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CurvePoint {
    pub eps: [f64; 3],
    pub bound: f64,
}

/// A plateau length together with the curve it was read from.
#[derive(Clone, Debug, Serialize)]
pub struct PlateauResult {
    pub epsilon_star: f64,
    pub method: Method,
    pub curve: Vec<CurvePoint>,
}

impl PlateauResult {
    /// CSV with columns eps_x, eps_y, eps_z, bound, method.
    pub fn to_table(&self) -> Table {
        curve_table(&self.curve, self.method)
    }
}

pub fn curve_table(curve: &[CurvePoint], method: Method) -> Table {
    let mut table = Table::new(&["eps_x", "eps_y", "eps_z", "bound", "method"]);
    for p in curve {
        table.push(vec![
            sig12(p.eps[0]),
            sig12(p.eps[1]),
            sig12(p.eps[2]),
            sig12(p.bound),
            method.as_str().to_string(),
        ]);
    }
    table
}

/// ESI bound curve along the uniform-ε diagonal, max(f(ε), 1), with its plateau.
pub fn esi_closed_form_curve(samples: usize, eps_max: f64) -> Result<PlateauResult> {
    let n = samples.max(2);
    let mut curve = Vec::with_capacity(n);
    for i in 0..n {
        let e = eps_max * i as f64 / (n - 1) as f64;
        curve.push(CurvePoint { eps: [e; 3], bound: f_eps(e)?.max(1.0) });
    }
    Ok(PlateauResult { epsilon_star: epsilon_star_esi(), method: Method::ClosedForm, curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_of_the_plateau_agree() {
        let e = epsilon_star_esi();
        assert!((e - epsilon_star_esi_alt()).abs() < 1e-15);
        assert!((f_eps(e).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lemma_shift_decreases_in_mu() {
        let mut last = f64::INFINITY;
        for k in 0..30 {
            let mu = -1.0 + 0.1 * k as f64;
            let (_, shift) = lemma_operator_bound(0.01, mu, 1).unwrap();
            assert!(shift >= 0.0 && shift <= last + 1e-15);
            last = shift;
        }
    }

    #[test]
    fn symmetric_expansion_at_origin() {
        let v = taylor_plateau(0.0, 0.0).unwrap();
        assert!((v - (1.0 - (7.0f64 / 8.0).sqrt()) / 2.0).abs() < 1e-15);
    }
}
