//! Detection-efficiency analysis: Alice's measurements succeed with probability η
//! and failed rounds are mapped to a fixed deterministic output.

use serde::Serialize;

use crate::error::{invalid, numerical, Result};
use crate::numerics::linalg::{c, hermitian_basis, partial_trace_matrix, ComplexVector, HermitianOperator, Subsystem};
use crate::numerics::{sdp_solve, LinearConstraint, LmiBlock, SdpProblem};
use crate::plateau::{f_eps, pauli_bound};
use crate::quantum::BlochVector;
use crate::table::{sig12, Table};
use crate::witness::{dodecahedron_directions, family_witness, lhs_bound, DeterministicStrategy, Witness};

/// Lossy detection on Alice's side.
#[derive(Clone, Debug)]
pub struct LossModel {
    pub eta: f64,
    pub failure: DeterministicStrategy,
}

impl LossModel {
    pub fn new(eta: f64, failure: DeterministicStrategy) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid(format!("η = {eta} outside [0, 1]")));
        }
        Ok(Self { eta, failure })
    }

    /// Observed witness value η·Q + (1 − η)·C.
    pub fn observed(&self, q: f64, c: f64) -> f64 {
        self.eta * q + (1.0 - self.eta) * c
    }

    /// Checks that the failure strategy covers every input of `w`.
    pub fn check(&self, w: &Witness) -> Result<()> {
        if self.failure.n_x() != w.n_x() {
            return Err(invalid("failure strategy does not cover all of Alice's inputs"));
        }
        Ok(())
    }
}

/// Critical efficiency, or η = 1 with `detectable = false` when Q ≤ β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaCrit {
    pub eta: f64,
    pub detectable: bool,
}

/// Solves η·Q + (1 − η)·C = β, i.e. η = (β − C)/(Q − C).
pub fn eta_crit_general(q: f64, c: f64, beta: f64) -> Result<EtaCrit> {
    if !(q.is_finite() && c.is_finite() && beta.is_finite()) {
        return Err(invalid("non-finite witness values"));
    }
    if c > beta {
        return Err(invalid(format!("failure value C = {c} exceeds the bound β = {beta}")));
    }
    if q <= beta {
        return Ok(EtaCrit { eta: 1.0, detectable: false });
    }
    Ok(EtaCrit { eta: (beta - c) / (q - c), detectable: true })
}

/// Failure outputs (0, 1, 1, 0) used with the ESI witness.
pub fn esi_failure_strategy() -> DeterministicStrategy {
    DeterministicStrategy::from_bits(0b0110, 4)
}

/// ESI value √(2 − cos 4θ) on cos θ|00⟩ + sin θ|11⟩ with tilted measurements.
pub fn esi_quantum_value(theta: f64) -> f64 {
    (2.0 - (4.0 * theta).cos()).sqrt()
}

/// Value 2cos²θ − 1 of the failure strategy on the same state.
pub fn esi_failure_value(theta: f64) -> f64 {
    (2.0 * theta).cos()
}

/// η_crit = 2sin²θ / (√(2 − cos 4θ) − cos 2θ) for θ ∈ (0, π/4].
pub fn eta_crit_esi(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let s = theta.sin();
    Ok(2.0 * s * s / (esi_quantum_value(theta) - esi_failure_value(theta)))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_4 + 1e-15) {
        return Err(invalid(format!("θ = {theta} outside (0, π/4]")));
    }
    Ok(())
}

/// ESI critical efficiency at imprecision ε: the bound is max(1, f(ε)), and the
/// state parameter is optimized. Inside the plateau this is the θ → 0 limit 1/3.
pub fn eta_crit_esi_at(eps: f64) -> Result<f64> {
    let beta = f_eps(eps)?.max(1.0);
    if beta == 1.0 {
        return Ok(1.0 / 3.0);
    }
    let eta = |theta: f64| {
        let (q, c) = (esi_quantum_value(theta), esi_failure_value(theta));
        eta_crit_general(q, c.min(beta), beta).map(|e| e.eta).unwrap_or(1.0)
    };
    Ok(minimize_theta(eta).1)
}

/// Minimizes a function of θ over (0, π/4] by a log grid and golden-section refinement.
fn minimize_theta(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let quarter = std::f64::consts::FRAC_PI_4;
    let n = 80;
    let grid: Vec<f64> = (0..=n).map(|i| 1e-5 * (quarter / 1e-5).powf(i as f64 / n as f64)).collect();
    let mut best = 0;
    let mut vals = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        vals.push(f(t));
        if vals[i] < vals[best] {
            best = i;
        }
    }
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(n)];
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-13 * b.max(1e-300) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    let (t, v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    if vals[best] < v {
        (grid[best], vals[best])
    } else {
        (t, v)
    }
}

/// One sample of an efficiency curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EfficiencySample {
    pub parameter: f64,
    pub q: f64,
    pub c: f64,
    pub eta_crit: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EfficiencyCurve {
    pub samples: Vec<EfficiencySample>,
}

impl EfficiencyCurve {
    /// CSV with columns parameter, Q, C, eta_crit, eps.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["parameter", "Q", "C", "eta_crit", "eps"]);
        for s in &self.samples {
            t.push(vec![sig12(s.parameter), sig12(s.q), sig12(s.c), sig12(s.eta_crit), sig12(s.eps)]);
        }
        t
    }
}

/// ESI curve over θ at fixed ε (the LHS bound is max(1, f(ε))).
pub fn esi_efficiency_curve(thetas: &[f64], eps: f64) -> Result<EfficiencyCurve> {
    let beta = f_eps(eps)?.max(1.0);
    let mut samples = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        check_theta(theta)?;
        let (q, c) = (esi_quantum_value(theta), esi_failure_value(theta));
        let eta = eta_crit_general(q, c.min(beta), beta)?.eta;
        samples.push(EfficiencySample { parameter: theta, q, c, eta_crit: eta, eps });
    }
    Ok(EfficiencyCurve { samples })
}

/// (cos θ|00⟩ + sin θ|11⟩ + sin θ|22⟩ + cos θ|33⟩)/√2, with Bob's basis the
/// eigenbasis H⊗H|k⟩ of the first target X⊗X (eigenvalues +, −, −, +).
pub fn n4_ansatz_state(theta: f64) -> HermitianOperator {
    let amp = [theta.cos(), theta.sin(), theta.sin(), theta.cos()];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = |bit: usize, row: usize| if bit == 1 && row == 1 { -h } else { h };
    let mut v = ComplexVector::zeros(16);
    for (k, a) in amp.iter().enumerate() {
        // Bob's vector H⊗H|k⟩
        for row in 0..4 {
            let entry = had(k >> 1, row >> 1) * had(k & 1, row & 1);
            v[k * 4 + row] += c(a * h * entry, 0.0);
        }
    }
    HermitianOperator::projector(&v)
}

/// (Q_θ, C_θ) for the n = 4 witness: Q_θ = Σ_x ‖tr_B[(𝟙 ⊗ K_x)ρ_θ]‖₁ with
/// K_x = Σ_y c_{xy} B_y (Alice's optimal observables), C_θ = ⟨B₁⟩.
pub fn n4_quantum_value(theta: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    let w = family_witness(4)?;
    let rho = n4_ansatz_state(theta);
    let corr = w.full_correlation().ok_or_else(|| invalid("family witness lost its correlators"))?.clone();
    let mut q = 0.0;
    for x in 0..w.n_x() {
        let mut k = HermitianOperator::zeros(4);
        for y in 0..w.n_y() {
            k = &k + &w.targets()[y].op().scale(corr[(x, y)]);
        }
        let op = crate::numerics::kron(&HermitianOperator::identity(4), &k);
        let reduced = partial_trace_matrix(&op.product(&rho), (4, 4), Subsystem::B)?;
        let alice = HermitianOperator::symmetrized(reduced);
        q += alice.eigenvalues().iter().map(|e| e.abs()).sum::<f64>();
    }
    let b1 = crate::numerics::kron(&HermitianOperator::identity(4), w.targets()[0].op());
    Ok((q, rho.inner(&b1)))
}

/// Critical efficiency of the n = 4 witness under the ansatz state, with failure
/// outputs given by the constant strategy (value ⟨B₁⟩).
pub fn eta_crit_n4(theta: f64) -> Result<f64> {
    let (q, c) = n4_quantum_value(theta)?;
    Ok(eta_crit_general(q, c, 1.0)?.eta)
}

/// Richardson extrapolation to θ → 0 from θ = 10⁻³ and 10⁻⁴, assuming
/// corrections in θ².
pub fn theta_limit(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let a = f(1e-3)?;
    let b = f(1e-4)?;
    Ok((100.0 * b - a) / 99.0)
}

/// Largest observed value η·Q + (1 − η)·C of the n = 4 witness over all
/// assemblages, with failed rounds answered by the constant strategy
/// (C = tr(B₁ Σ_a σ_{a|x})). The witness is detectable at η when this exceeds
/// the LHS bound 1.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DetectionPoint {
    pub eta: f64,
    pub value: f64,
    /// Ideal-detection value Q and failure value C at the optimum.
    pub q: f64,
    pub c: f64,
    pub detectable: bool,
}

pub fn detection_sdp_n4(eta: f64) -> Result<DetectionPoint> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(invalid(format!("η = {eta} outside [0, 1]")));
    }
    let w = family_witness(4)?;
    let d = w.dim();
    let herm = hermitian_basis(d);
    let nh = herm.len();
    let n_x = w.n_x();
    let m = nh * (1 + n_x);
    let mut p = SdpProblem::new(m);
    let mut norm = vec![0.0; m];
    let mut q_row = vec![0.0; m];
    let mut c_row = vec![0.0; m];
    let b1 = w.targets()[0].op();
    for (j, h) in herm.iter().enumerate() {
        norm[j] = h.trace();
        c_row[j] = h.inner(b1);
    }
    for x in 0..n_x {
        let e0 = w.effective_operator(0, x);
        let e1 = w.effective_operator(1, x);
        let sig = nh * (1 + x);
        let mut lower = LmiBlock::new(d);
        let mut upper = LmiBlock::new(d);
        for (j, h) in herm.iter().enumerate() {
            lower.add_term(sig + j, h.matrix().clone());
            upper.add_term(j, h.matrix().clone());
            upper.add_term(sig + j, -h.matrix().clone());
            // σ_{1|x} = ρ − σ_{0|x}
            q_row[sig + j] += h.inner(&e0) - h.inner(&e1);
            q_row[j] += h.inner(&e1);
        }
        p.blocks.push(lower);
        p.blocks.push(upper);
    }
    p.objective = q_row.iter().zip(&c_row).map(|(q, c)| eta * q + (1.0 - eta) * c).collect();
    p.equalities.push(LinearConstraint::new(norm, 1.0));
    let sol = sdp_solve(&p, 1e-9)?;
    if !sol.is_optimal() {
        return Err(numerical(format!("detection program ended with status {:?}", sol.status)));
    }
    let dot = |row: &[f64]| row.iter().zip(&sol.variables).map(|(a, b)| a * b).sum::<f64>();
    Ok(DetectionPoint {
        eta,
        value: sol.objective,
        q: dot(&q_row),
        c: dot(&c_row),
        detectable: sol.objective > 1.0 + 1e-6,
    })
}

/// Result of a search over partially entangled states.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtaSearch {
    pub eta: f64,
    pub theta: f64,
    /// Bob's Schmidt axis.
    pub axis: [f64; 3],
    pub q: f64,
    pub c: f64,
}

/// Minimal η for a correlation witness Σ_k w_k⟨A_k ⊗ d_k·σ⟩ with LHS bound β,
/// over cos θ|00⟩ + sin θ|11⟩ (Schmidt axis n on Bob), optimal Alice observables
/// and optimal failure outputs.
///
/// With p_k = n·d_k: Q = Σ w_k √(p_k² + sin²2θ(1 − p_k²)) and C = cos 2θ Σ w_k|p_k|.
/// Axes are scanned on a seeded Fibonacci lattice and refined by compass search.
pub fn bloch_witness_eta(directions: &[BlochVector], weights: &[f64], beta: f64, seed: u64) -> Result<EtaSearch> {
    if directions.len() != weights.len() || directions.is_empty() {
        return Err(invalid("one weight per direction expected"));
    }
    let eval = |axis: &[f64; 3], theta: f64| -> (f64, f64, f64) {
        let (s2, c2) = ((2.0 * theta).sin(), (2.0 * theta).cos());
        let sin2 = theta.sin().powi(2);
        let (mut q, mut c, mut gap, mut sum_abs) = (0.0, 0.0, 0.0, 0.0);
        for (d, wk) in directions.iter().zip(weights) {
            let p = axis[0] * d.0[0] + axis[1] * d.0[1] + axis[2] * d.0[2];
            let root = (p * p + s2 * s2 * (1.0 - p * p)).sqrt();
            q += wk * root;
            c += wk * c2 * p.abs();
            sum_abs += wk * p.abs();
            // Q − C without cancellation: s²/(root + c₂|p|)
            let den = root + c2 * p.abs();
            if den > 0.0 {
                gap += wk * s2 * s2 / den;
            }
        }
        // β − C = (β − S) + 2 sin²θ·S with S = Σ w|p|
        let num = (beta - sum_abs) + 2.0 * sin2 * sum_abs;
        let eta = if gap > 0.0 && num >= 0.0 { num / gap } else { f64::INFINITY };
        (eta, q, c)
    };
    let best_theta = |axis: &[f64; 3]| minimize_theta(|t| eval(axis, t).0.min(1e3));
    // Fibonacci lattice on the upper hemisphere, rotated by a seeded offset
    let n = 3000;
    let offset = (seed as f64 * 0.618_033_988_749_895).fract();
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut starts: Vec<(f64, [f64; 3])> = (0..n)
        .map(|i| {
            let z = (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64 + 2.0 * std::f64::consts::PI * offset;
            let axis = [r * phi.cos(), r * phi.sin(), z];
            let mut coarse = f64::INFINITY;
            for k in 1..=12 {
                coarse = coarse.min(eval(&axis, std::f64::consts::FRAC_PI_4 * k as f64 / 12.0).0);
                coarse = coarse.min(eval(&axis, 1e-4 * k as f64).0);
            }
            (coarse, axis)
        })
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = (f64::INFINITY, 0.0, [0.0, 0.0, 1.0]);
    for (_, start) in starts.iter().take(8) {
        let mut axis = *start;
        let (mut t, mut v) = best_theta(&axis);
        let mut step = 0.05;
        while step > 1e-9 {
            let mut improved = false;
            for k in 0..3 {
                for sgn in [-1.0, 1.0] {
                    let mut cand = axis;
                    cand[k] += sgn * step;
                    let norm = (cand[0] * cand[0] + cand[1] * cand[1] + cand[2] * cand[2]).sqrt();
                    cand.iter_mut().for_each(|c| *c /= norm);
                    let (tc, vc) = best_theta(&cand);
                    if vc < v - 1e-15 {
                        axis = cand;
                        t = tc;
                        v = vc;
                        improved = true;
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        if v < best.0 {
            best = (v, t, axis);
        }
    }
    if !best.0.is_finite() || best.0 > 1.0 {
        return Ok(EtaSearch { eta: 1.0, theta: best.1, axis: best.2, q: f64::NAN, c: f64::NAN });
    }
    let (_, q, c) = eval(&best.2, best.1);
    Ok(EtaSearch { eta: best.0, theta: best.1, axis: best.2, q, c })
}

/// Pauli witness with LHS bound pauli_bound(ε).
pub fn pauli_eta_search(eps: f64, seed: u64) -> Result<EtaSearch> {
    if !(0.0..=0.02).contains(&eps) {
        return Err(invalid("ε must lie in [0, 0.02]"));
    }
    let dirs = [BlochVector::unit([1.0, 0.0, 0.0]), BlochVector::unit([0.0, 1.0, 0.0]), BlochVector::unit([0.0, 0.0, 1.0])];
    let wts = [1.0 / 3f64.sqrt(); 3];
    bloch_witness_eta(&dirs, &wts, pauli_bound(eps)?.max(1.0), seed)
}

/// Ten-setting dodecahedron witness with LHS bound `beta`.
pub fn dodecahedron_eta(beta: f64, seed: u64) -> Result<EtaSearch> {
    let dirs = dodecahedron_directions();
    let wts = vec![0.1; dirs.len()];
    bloch_witness_eta(&dirs, &wts, beta, seed)
}

/// Dodecahedron critical efficiency at ε = 0, with the exact LHS bound (3 + √5)/10.
pub fn dodecahedron_eta_ideal(seed: u64) -> Result<EtaSearch> {
    let w = crate::witness::dodecahedron_witness();
    dodecahedron_eta(lhs_bound(&w)?, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defining_equation_holds() {
        for theta in [0.1, 0.3, 0.7] {
            let eta = eta_crit_esi(theta).unwrap();
            let lhs = eta * esi_quantum_value(theta) + (1.0 - eta) * esi_failure_value(theta);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ansatz_at_maximal_entanglement() {
        let (q, c) = n4_quantum_value(std::f64::consts::FRAC_PI_4).unwrap();
        assert!((q - 2.0).abs() < 1e-10);
        assert!(c.abs() < 1e-12);
    }

    #[test]
    fn no_violation_gives_unit_efficiency() {
        let e = eta_crit_general(0.9, 0.0, 1.0).unwrap();
        assert_eq!(e, EtaCrit { eta: 1.0, detectable: false });
    }
}
