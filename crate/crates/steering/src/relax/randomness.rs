use serde::{Deserialize, Serialize};

use super::{MonomialList, RELAX_TOL};
use crate::error::{invalid, numerical, Error, Result};
use crate::numerics::linalg::{hermitian_basis, kron_matrix, ComplexMatrix, HermitianOperator};
use crate::numerics::{sdp_solve, LinearConstraint, LmiBlock, SdpProblem, SdpStatus};
use crate::plateau::lemma_witness_bound;
use crate::quantum::ImprecisionSpec;
use crate::table::{sig12, Table};
use crate::witness::{lhs_bound, Witness};

/// One point of a randomness curve.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RandomnessPoint {
    pub witness_value: f64,
    pub pg: f64,
    pub r: f64,
}

impl RandomnessPoint {
    fn new(witness_value: f64, pg: f64) -> Self {
        let pg = pg.clamp(0.5, 1.0);
        Self { witness_value, pg, r: (-pg.log2()).max(0.0) }
    }
}

/// Controls for the Lagrangian evaluation of the guessing probability.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomnessSettings {
    /// Multipliers λ_j = lambda_max·(j/(grid − 1))², j = 0..grid.
    pub lambda_max: f64,
    pub grid: usize,
    pub tol: f64,
}

impl Default for RandomnessSettings {
    fn default() -> Self {
        Self { lambda_max: 40.0, grid: 81, tol: 1e-8 }
    }
}

impl RandomnessSettings {
    fn lambdas(&self) -> Result<Vec<f64>> {
        if self.grid < 2 || !(self.lambda_max > 0.0) {
            return Err(invalid("the multiplier grid needs two points and λ_max > 0"));
        }
        let n = (self.grid - 1) as f64;
        Ok((0..self.grid).map(|j| self.lambda_max * (j as f64 / n).powi(2)).collect())
    }
}

/// Word list over {σ_{a|x}, B^targ_{b|y}, B^ε_{b|y}} for a four-input,
/// three-target assemblage; level 2 gives side 397.
pub fn randomness_monomials(level: usize) -> MonomialList {
    MonomialList::assemblage(4, 3, level)
}

/// Guessing probability at ε = 0 from assemblage-level SDPs.
///
/// Eve holds a decomposition σ_{a|x} = Σ_e σ^e_{a|x} over guess patterns
/// e ∈ {0,1}^{n_X}, each part a valid (unnormalized) assemblage, and guesses
/// e_x. Returns (P_g, R).
pub fn guessing_probability_exact(w: &Witness, observed: f64) -> Result<(f64, f64)> {
    let p = RandomnessPoint::new(observed, exact_pg(w, observed)?);
    Ok((p.pg, p.r))
}

fn exact_pg(w: &Witness, observed: f64) -> Result<f64> {
    if w.n_x() > 8 {
        return Err(invalid("guess patterns are enumerated; at most 8 inputs"));
    }
    if observed <= lhs_bound(w)? + 1e-12 {
        return Ok(1.0);
    }
    let d = w.dim();
    let herm = hermitian_basis(d);
    let nh = herm.len();
    let n_x = w.n_x();
    let n_e = 1usize << n_x;
    // per pattern: ρ^e then σ^e_{0|x}
    let per = nh * (1 + n_x);
    let m = n_e * per;
    let mut p = SdpProblem::new(m);
    let mut norm = vec![0.0; m];
    let mut value = vec![0.0; m];
    let mut weight = vec![[0.0; 2]; n_x * nh];
    for x in 0..n_x {
        for a in 0..2 {
            let op = w.effective_operator(a, x);
            for (j, h) in herm.iter().enumerate() {
                weight[x * nh + j][a] = h.inner(&op);
            }
        }
    }
    for e in 0..n_e {
        let rho = e * per;
        for (j, h) in herm.iter().enumerate() {
            norm[rho + j] = h.trace();
        }
        for x in 0..n_x {
            let sig = rho + nh * (1 + x);
            let mut lower = LmiBlock::new(d);
            let mut upper = LmiBlock::new(d);
            let guess = (e >> x) & 1;
            for (j, h) in herm.iter().enumerate() {
                lower.add_term(sig + j, h.matrix().clone());
                upper.add_term(rho + j, h.matrix().clone());
                upper.add_term(sig + j, -h.matrix().clone());
                // σ_{1|x} = ρ − σ_{0|x}
                let [w0, w1] = weight[x * nh + j];
                value[sig + j] += w0 - w1;
                value[rho + j] += w1;
                let t = h.trace() / n_x as f64;
                if guess == 0 {
                    p.objective[sig + j] += t;
                } else {
                    p.objective[rho + j] += t;
                    p.objective[sig + j] -= t;
                }
            }
            p.blocks.push(lower);
            p.blocks.push(upper);
        }
    }
    p.equalities.push(LinearConstraint::new(norm, 1.0));
    p.equalities.push(LinearConstraint::new(value, observed));
    let sol = sdp_solve(&p, RELAX_TOL)?;
    match sol.status {
        SdpStatus::Optimal | SdpStatus::NearOptimal => Ok(sol.objective),
        // above the quantum value no assemblage exists
        SdpStatus::Infeasible => Ok(0.5),
        s => Err(numerical(format!("guessing program ended with status {s:?}"))),
    }
}

/// P_g(w) ≤ min_λ≥0 [max_e H_e(λ) − λ·w], where H_e(λ) is the largest value of
/// guess_e + λ·W over one normalized attack with guess pattern e.
///
/// At ε > 0 each attack carries its own lab measurements through the lifted
/// operators Ξ_y ≈ ρ ⊗ B^ε_{0|y} and O_{xy} ≈ σ_{0|x} ⊗ B^ε_{0|y}, with the
/// fidelity constraints imposed on every positive part. Every multiplier gives
/// a valid bound, so the grid minimum is one as well.
pub fn guessing_probability(
    w: &Witness,
    observed: f64,
    spec: &ImprecisionSpec,
    settings: &RandomnessSettings,
) -> Result<(f64, f64)> {
    let p = randomness_curve(w, &[observed], spec, settings)?[0];
    Ok((p.pg, p.r))
}

/// Randomness over several observed values; one dual table is shared, so the
/// bound is non-increasing in the witness value. Values an LHS model can reach
/// (at most the ε-bound) certify nothing: P_g = 1, R = 0.
pub fn randomness_curve(
    w: &Witness,
    values: &[f64],
    spec: &ImprecisionSpec,
    settings: &RandomnessSettings,
) -> Result<Vec<RandomnessPoint>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("non-finite witness value"));
    }
    let dual = dual_table(w, spec, settings)?;
    let beta = lemma_witness_bound(w, spec)?;
    Ok(values
        .iter()
        .map(|&v| {
            if v <= beta {
                return RandomnessPoint::new(v, 1.0);
            }
            let pg = dual.iter().map(|(lam, f)| f - lam * v).fold(f64::INFINITY, f64::min);
            RandomnessPoint::new(v, pg)
        })
        .collect())
}

/// CSV with columns witness_value, Pg, R.
pub fn randomness_table(points: &[RandomnessPoint]) -> Table {
    let mut t = Table::new(&["witness_value", "Pg", "R"]);
    for p in points {
        t.push(vec![sig12(p.witness_value), sig12(p.pg), sig12(p.r)]);
    }
    t
}

/// (λ, max_e H_e(λ)) over the settings' grid.
fn dual_table(w: &Witness, spec: &ImprecisionSpec, settings: &RandomnessSettings) -> Result<Vec<(f64, f64)>> {
    if w.n_x() > 8 {
        return Err(invalid("guess patterns are enumerated; at most 8 inputs"));
    }
    if spec.n_y() != w.n_y() {
        return Err(invalid("imprecision spec does not match the witness targets"));
    }
    let programs: Vec<PatternProgram> =
        (0..1u64 << w.n_x()).map(|e| PatternProgram::build(w, spec, e)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(settings.grid);
    // A multiplier whose programs fail to converge is dropped; the remaining
    // ones still give valid bounds.
    'grid: for lam in settings.lambdas()? {
        let mut best = f64::NEG_INFINITY;
        for prog in &programs {
            match prog.value(lam, settings.tol) {
                Ok(v) => best = best.max(v),
                Err(Error::NumericalFailure(_)) => continue 'grid,
                Err(e) => return Err(e),
            }
        }
        out.push((lam, best));
    }
    if out.is_empty() {
        return Err(numerical("no multiplier produced a converged bound"));
    }
    Ok(out)
}

/// One attack with fixed guess pattern, normalized to tr ρ = 1.
struct PatternProgram {
    problem: SdpProblem,
    guess: Vec<f64>,
    witness: Vec<f64>,
}

impl PatternProgram {
    fn value(&self, lam: f64, tol: f64) -> Result<f64> {
        let mut p = self.problem.clone();
        p.objective = self.guess.iter().zip(&self.witness).map(|(g, v)| g + lam * v).collect();
        let sol = sdp_solve(&p, tol)?;
        if !sol.is_optimal() {
            return Err(numerical(format!("attack program ended with status {:?}", sol.status)));
        }
        Ok(sol.objective)
    }

    fn build(w: &Witness, spec: &ImprecisionSpec, pattern: u64) -> Result<Self> {
        if spec.is_exact() {
            Self::exact(w, pattern)
        } else {
            Self::lifted(w, spec, pattern)
        }
    }

    /// Variables: ρ then σ_{0|x}; Bob measures the targets.
    fn exact(w: &Witness, pattern: u64) -> Result<Self> {
        let d = w.dim();
        let herm = hermitian_basis(d);
        let nh = herm.len();
        let n_x = w.n_x();
        let m = nh * (1 + n_x);
        let mut problem = SdpProblem::new(m);
        let mut guess = vec![0.0; m];
        let mut witness = vec![0.0; m];
        let norm: Vec<f64> = (0..m).map(|j| if j < nh { herm[j].trace() } else { 0.0 }).collect();
        for x in 0..n_x {
            let sig = nh * (1 + x);
            let e0 = w.effective_operator(0, x);
            let e1 = w.effective_operator(1, x);
            let mut lower = LmiBlock::new(d);
            let mut upper = LmiBlock::new(d);
            for (j, h) in herm.iter().enumerate() {
                lower.add_term(sig + j, h.matrix().clone());
                upper.add_term(j, h.matrix().clone());
                upper.add_term(sig + j, -h.matrix().clone());
                witness[sig + j] += h.inner(&e0) - h.inner(&e1);
                witness[j] += h.inner(&e1);
                add_guess(&mut guess, pattern, x, n_x, j, sig + j, h.trace());
            }
            problem.blocks.push(lower);
            problem.blocks.push(upper);
        }
        problem.equalities.push(LinearConstraint::new(norm, 1.0));
        Ok(Self { problem, guess, witness })
    }

    /// Variables: ρ, σ_{0|x}, Ξ_y, O_{xy} in orthonormal Hermitian coordinates.
    fn lifted(w: &Witness, spec: &ImprecisionSpec, pattern: u64) -> Result<Self> {
        let d = w.dim();
        let dd = d * d;
        let h1 = hermitian_basis(d);
        let h2 = hermitian_basis(dd);
        let (n1, n2) = (h1.len(), h2.len());
        let (n_x, n_y) = (w.n_x(), w.n_y());
        let xi = |y: usize| n1 * (1 + n_x) + n2 * y;
        let o = |x: usize, y: usize| n1 * (1 + n_x) + n2 * (n_y + x * n_y + y);
        let m = n1 * (1 + n_x) + n2 * n_y * (1 + n_x);
        let mut problem = SdpProblem::new(m);
        let mut guess = vec![0.0; m];
        let mut witness = vec![0.0; m];

        let ident = ComplexMatrix::identity(d, d);
        let lifted1: Vec<ComplexMatrix> = h1.iter().map(|h| kron_matrix(h.matrix(), &ident)).collect();
        let mut swap = ComplexMatrix::zeros(dd, dd);
        for i in 0..d {
            for j in 0..d {
                swap[(i * d + j, j * d + i)] = crate::numerics::linalg::c(1.0, 0.0);
            }
        }
        let swap = HermitianOperator::new(swap)?;
        let sw: Vec<f64> = h2.iter().map(|h| h.inner(&swap)).collect();
        // ⟨h_j ⊗ 𝟙, H_k⟩, the partial trace over the second factor
        let pt2: Vec<Vec<f64>> = lifted1
            .iter()
            .map(|l| {
                let l = HermitianOperator::new(l.clone()).expect("hermitian");
                h2.iter().map(|h| h.inner(&l)).collect()
            })
            .collect();
        let tr1: Vec<f64> = h1.iter().map(|h| h.trace()).collect();

        let mut norm = vec![0.0; m];
        norm[..n1].copy_from_slice(&tr1);
        problem.equalities.push(LinearConstraint::new(norm, 1.0));

        for y in 0..n_y {
            let t: Vec<HermitianOperator> = (0..2).map(|b| w.target_projector(b, y)).collect();
            let rank: Vec<f64> = t.iter().map(|p| p.trace().round()).collect();
            let fid: Vec<Vec<f64>> = t
                .iter()
                .map(|p| {
                    let l = HermitianOperator::new(kron_matrix(&ident, p.matrix())).expect("hermitian");
                    h2.iter().map(|h| h.inner(&l)).collect()
                })
                .collect();
            let floor = [(1.0 - spec.get(0, y)) * rank[0], (1.0 - spec.get(1, y)) * rank[1]];
            // tr₂ Ξ_y = r ρ
            for j in 0..n1 {
                let mut row = vec![0.0; m];
                for k in 0..n2 {
                    row[xi(y) + k] = pt2[j][k];
                }
                row[j] -= rank[0];
                problem.equalities.push(LinearConstraint::new(row, 0.0));
            }
            for x in 0..n_x {
                let sig = n1 * (1 + x);
                let (ox, xy) = (o(x, y), xi(y));
                for j in 0..n1 {
                    let mut row = vec![0.0; m];
                    for k in 0..n2 {
                        row[ox + k] = pt2[j][k];
                    }
                    row[sig + j] -= rank[0];
                    problem.equalities.push(LinearConstraint::new(row, 0.0));
                }
                // the four positive parts σ_{a|x} ⊗ B_{b|y}
                let mut b00 = LmiBlock::new(dd);
                let mut b10 = LmiBlock::new(dd);
                let mut b01 = LmiBlock::new(dd);
                let mut b11 = LmiBlock::new(dd);
                for (k, h) in h2.iter().enumerate() {
                    b00.add_term(ox + k, h.matrix().clone());
                    b10.add_term(xy + k, h.matrix().clone());
                    b10.add_term(ox + k, -h.matrix().clone());
                    b01.add_term(ox + k, -h.matrix().clone());
                    b11.add_term(xy + k, -h.matrix().clone());
                    b11.add_term(ox + k, h.matrix().clone());
                }
                for (j, l) in lifted1.iter().enumerate() {
                    b01.add_term(sig + j, l.clone());
                    b11.add_term(j, l.clone());
                    b11.add_term(sig + j, -l.clone());
                }
                problem.blocks.extend([b00, b10, b01, b11]);

                // fidelity: ⟨𝟙⊗T_b, part⟩ ≥ (1 − ε_b) r_b tr σ_a, written as row·s ≤ 0
                let mut f00 = vec![0.0; m];
                let mut f10 = vec![0.0; m];
                let mut f01 = vec![0.0; m];
                let mut f11 = vec![0.0; m];
                for k in 0..n2 {
                    f00[ox + k] -= fid[0][k];
                    f10[xy + k] -= fid[0][k];
                    f10[ox + k] += fid[0][k];
                    f01[ox + k] += fid[1][k];
                    f11[xy + k] += fid[1][k];
                    f11[ox + k] -= fid[1][k];
                }
                for j in 0..n1 {
                    let tj = tr1[j];
                    f00[sig + j] += floor[0] * tj;
                    f10[j] += floor[0] * tj;
                    f10[sig + j] -= floor[0] * tj;
                    // ⟨𝟙⊗T₁, σ⊗𝟙⟩ = r₁ tr σ
                    f01[sig + j] += (floor[1] - rank[1]) * tj;
                    f11[j] += (floor[1] - rank[1]) * tj;
                    f11[sig + j] -= (floor[1] - rank[1]) * tj;
                }
                for row in [f00, f10, f01, f11] {
                    problem.inequalities.push(LinearConstraint::new(row, 0.0));
                }

                // W: tr(σ_a B_b) with tr(σ₀B₀) = ⟨S, O⟩, tr(σ₁B₀) = ⟨S, Ξ − O⟩
                let c = |a, b| w.coeff(a, b, x, y);
                for k in 0..n2 {
                    witness[ox + k] += (c(0, 0) - c(0, 1) - c(1, 0) + c(1, 1)) * sw[k];
                    witness[xy + k] += (c(1, 0) - c(1, 1)) * sw[k];
                }
                for j in 0..n1 {
                    witness[sig + j] += (c(0, 1) - c(1, 1)) * tr1[j];
                    witness[j] += c(1, 1) * tr1[j];
                }
            }
        }
        for x in 0..n_x {
            let sig = n1 * (1 + x);
            let mut lower = LmiBlock::new(d);
            let mut upper = LmiBlock::new(d);
            for (j, h) in h1.iter().enumerate() {
                lower.add_term(sig + j, h.matrix().clone());
                upper.add_term(j, h.matrix().clone());
                upper.add_term(sig + j, -h.matrix().clone());
                add_guess(&mut guess, pattern, x, n_x, j, sig + j, h.trace());
            }
            problem.blocks.push(lower);
            problem.blocks.push(upper);
        }
        Ok(Self { problem, guess, witness })
    }
}

/// Adds tr σ_{e_x|x}/n_x, with σ_{1|x} = ρ − σ_{0|x}.
fn add_guess(guess: &mut [f64], pattern: u64, x: usize, n_x: usize, rho_j: usize, sig_j: usize, tr: f64) {
    let t = tr / n_x as f64;
    if (pattern >> x) & 1 == 0 {
        guess[sig_j] += t;
    } else {
        guess[rho_j] += t;
        guess[sig_j] -= t;
    }
}

/// Largest guessing-probability gap, in bits of R, between two curves sampled
/// at the same witness values.
pub fn max_deficit(reference: &[RandomnessPoint], other: &[RandomnessPoint]) -> f64 {
    reference.iter().zip(other).map(|(a, b)| a.r - b.r).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::esi_witness;

    #[test]
    fn dual_bound_matches_primal_at_zero_imprecision() {
        let w = esi_witness();
        let spec = ImprecisionSpec::exact(3);
        let (pg, _) = guessing_probability_exact(&w, 1.4).unwrap();
        let settings = RandomnessSettings { grid: 161, ..Default::default() };
        let (pg_dual, _) = guessing_probability(&w, 1.4, &spec, &settings).unwrap();
        assert!(pg_dual >= pg - 1e-7, "{pg_dual} < {pg}");
        assert!(pg_dual - pg < 2e-3, "{pg_dual} vs {pg}");
    }
}
