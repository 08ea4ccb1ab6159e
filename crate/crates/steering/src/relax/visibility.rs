use super::{exact_settings, fidelity_constraints, target_rank, Letter, MomentBasis, MomentBlock, RELAX_TOL};
use crate::error::{invalid, numerical, Result};
use crate::numerics::linalg::{hermitian_basis, kron, HermitianOperator};
use crate::numerics::{sdp_solve, LinearConstraint, LmiBlock, SdpProblem};
use crate::quantum::{ImprecisionSpec, Observable};
use crate::witness::DeterministicStrategy;

/// Two-outcome correlations p(ab|xy), indexed `p[x][y][a][b]`.
#[derive(Clone, Debug)]
pub struct CorrelationTable {
    pub p: Vec<Vec<[[f64; 2]; 2]>>,
}

impl CorrelationTable {
    pub fn new(p: Vec<Vec<[[f64; 2]; 2]>>) -> Result<Self> {
        if p.is_empty() || p[0].is_empty() {
            return Err(invalid("empty correlation table"));
        }
        let n_y = p[0].len();
        for (x, row) in p.iter().enumerate() {
            if row.len() != n_y {
                return Err(invalid("ragged correlation table"));
            }
            for (y, cell) in row.iter().enumerate() {
                let total: f64 = cell.iter().flatten().sum();
                if cell.iter().flatten().any(|v| *v < -1e-12) || (total - 1.0).abs() > 1e-9 {
                    return Err(invalid(format!("p(·|x={x},y={y}) is not a distribution")));
                }
            }
        }
        Ok(Self { p })
    }

    /// p(ab|xy) = tr(ρ A_{a|x} ⊗ B_{b|y}).
    pub fn from_state(state: &HermitianOperator, alice: &[Observable], bob: &[Observable]) -> Result<Self> {
        let mut p = Vec::with_capacity(alice.len());
        for a_obs in alice {
            let mut row = Vec::with_capacity(bob.len());
            for b_obs in bob {
                let mut cell = [[0.0; 2]; 2];
                for (a, r) in cell.iter_mut().enumerate() {
                    for (b, v) in r.iter_mut().enumerate() {
                        *v = state.inner(&kron(&a_obs.projector(a), &b_obs.projector(b)));
                    }
                }
                row.push(cell);
            }
            p.push(row);
        }
        Self::new(p)
    }

    pub fn n_x(&self) -> usize {
        self.p.len()
    }

    pub fn n_y(&self) -> usize {
        self.p[0].len()
    }
}

/// Largest v such that v·p_targ + (1 − v)/4 admits an LHS model with
/// ε-imprecise lab measurements, relaxed with one moment matrix per strategy.
pub fn visibility_sdp(p_targ: &CorrelationTable, spec: &ImprecisionSpec, basis: &MomentBasis) -> Result<f64> {
    let (n_x, n_y) = (p_targ.n_x(), p_targ.n_y());
    if spec.n_y() != n_y {
        return Err(invalid("imprecision spec does not match the table"));
    }
    if n_x > 12 {
        return Err(invalid("too many inputs for the per-strategy visibility program"));
    }
    let pinned = basis.pinned_to(&exact_settings(spec))?;
    let basis = &pinned;
    let n_l = 1usize << n_x;
    let k = basis.num_variables();
    let m = n_l * k + 1;
    let v_idx = m - 1;
    let sigma = basis.index(&[Letter::State])?;
    let mut p = SdpProblem::new(m);
    p.objective[v_idx] = 1.0;
    let mut norm = vec![0.0; m];
    // correlation rows Σ_λ D_λ(a|x) Γ^λ_{σ,B_{b|y}} − v(p − 1/4) = 1/4
    let mut corr: Vec<Vec<f64>> = vec![vec![0.0; m]; n_x * n_y * 4];
    for lam in 0..n_l {
        let s = DeterministicStrategy::from_bits(lam as u64, n_x);
        let block = MomentBlock { basis, offset: lam * k };
        for (x, v) in norm.iter_mut().zip(block.entry(m, 0, 0)) {
            *x += v;
        }
        for y in 0..n_y {
            for b in 0..2u8 {
                let l = basis.index(&[Letter::Lab { b, y: y as u8 }])?;
                let row = block.entry(m, sigma, l);
                for x in 0..n_x {
                    let a = s.output(x);
                    let target = &mut corr[((x * n_y + y) * 2 + a) * 2 + b as usize];
                    for (t, v) in target.iter_mut().zip(row.iter()) {
                        *t += v;
                    }
                }
            }
        }
        p.inequalities.extend(fidelity_constraints(&block, m, spec, target_rank(basis))?);
        p.blocks.push(block.psd()?);
    }
    p.equalities.push(LinearConstraint::new(norm, basis.d as f64));
    for x in 0..n_x {
        for y in 0..n_y {
            for a in 0..2 {
                for b in 0..2 {
                    let mut row = corr[((x * n_y + y) * 2 + a) * 2 + b].clone();
                    row[v_idx] = -(p_targ.p[x][y][a][b] - 0.25);
                    p.equalities.push(LinearConstraint::new(row, 0.25));
                }
            }
        }
    }
    p.inequalities.push(LinearConstraint::sparse(m, &[(v_idx, 1.0)], 1.0));
    p.inequalities.push(LinearConstraint::sparse(m, &[(v_idx, -1.0)], 0.0));
    let sol = sdp_solve(&p, RELAX_TOL)?;
    if !sol.is_optimal() {
        return Err(numerical(format!("visibility program ended with status {:?}", sol.status)));
    }
    Ok(sol.objective)
}

/// Largest uniform ε for which [`visibility_sdp`] stays at its ε = 0 value.
///
/// Bisection on [0, `eps_max`] to 1e−5. The level-1 list is too coarse here
/// (its bound jumps as soon as ε > 0); level 2 keeps the ideal value on the plateau.
pub fn visibility_plateau(p_targ: &CorrelationTable, basis: &MomentBasis, eps_max: f64) -> Result<f64> {
    let n_y = p_targ.n_y();
    let v0 = visibility_sdp(p_targ, &ImprecisionSpec::exact(n_y), basis)?;
    let moved = |eps: f64| -> Result<bool> {
        Ok(visibility_sdp(p_targ, &ImprecisionSpec::uniform(n_y, eps)?, basis)? > v0 + 1e-7)
    };
    if !moved(eps_max)? {
        return Ok(eps_max);
    }
    let (mut lo, mut hi) = (0.0, eps_max);
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if moved(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ideal-measurement visibility from LHS states σ_λ directly, without moment matrices.
pub fn visibility_assemblage(p_targ: &CorrelationTable, targets: &[Observable]) -> Result<f64> {
    let (n_x, n_y) = (p_targ.n_x(), p_targ.n_y());
    if targets.len() != n_y {
        return Err(invalid("one target per Bob input expected"));
    }
    let d = targets[0].dim();
    let herm = hermitian_basis(d);
    let nh = herm.len();
    let n_l = 1usize << n_x;
    let m = n_l * nh + 1;
    let v_idx = m - 1;
    let mut p = SdpProblem::new(m);
    p.objective[v_idx] = 1.0;
    let mut norm = vec![0.0; m];
    let mut corr: Vec<Vec<f64>> = vec![vec![0.0; m]; n_x * n_y * 4];
    for lam in 0..n_l {
        let s = DeterministicStrategy::from_bits(lam as u64, n_x);
        let mut block = LmiBlock::new(d);
        for (j, h) in herm.iter().enumerate() {
            let var = lam * nh + j;
            block.add_term(var, h.matrix().clone());
            norm[var] += h.trace();
            for (y, t) in targets.iter().enumerate() {
                for b in 0..2 {
                    let val = h.inner(&t.projector(b));
                    for x in 0..n_x {
                        corr[((x * n_y + y) * 2 + s.output(x)) * 2 + b][var] += val;
                    }
                }
            }
        }
        p.blocks.push(block);
    }
    p.equalities.push(LinearConstraint::new(norm, 1.0));
    for x in 0..n_x {
        for y in 0..n_y {
            for a in 0..2 {
                for b in 0..2 {
                    let mut row = corr[((x * n_y + y) * 2 + a) * 2 + b].clone();
                    row[v_idx] = -(p_targ.p[x][y][a][b] - 0.25);
                    p.equalities.push(LinearConstraint::new(row, 0.25));
                }
            }
        }
    }
    p.inequalities.push(LinearConstraint::sparse(m, &[(v_idx, 1.0)], 1.0));
    p.inequalities.push(LinearConstraint::sparse(m, &[(v_idx, -1.0)], 0.0));
    let sol = sdp_solve(&p, RELAX_TOL)?;
    if !sol.is_optimal() {
        return Err(numerical(format!("visibility program ended with status {:?}", sol.status)));
    }
    Ok(sol.objective)
}
