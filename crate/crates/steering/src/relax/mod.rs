//! Moment-matrix relaxations over sampled, dimension-constrained bases:
//! per-strategy witness bounds under fidelity constraints, plateau lengths,
//! the visibility program and guessing-probability bounds.

mod basis;
mod monomials;
mod randomness;
mod visibility;

pub use basis::{basis_shape, build_basis, build_basis_pinned, BasisShape, MomentBasis, DEPENDENCE_TOL};
pub use monomials::{reduce, Letter, MonomialList};
pub use randomness::{
    max_deficit, randomness_table,
    guessing_probability, guessing_probability_exact, randomness_curve, randomness_monomials, RandomnessPoint,
    RandomnessSettings,
};
pub use visibility::{visibility_assemblage, visibility_plateau, visibility_sdp, CorrelationTable};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, numerical, Error, Result};
use crate::numerics::linalg::c;
use crate::numerics::{sdp_solve, LinearConstraint, LmiBlock, SdpProblem, SdpSolution};
use crate::quantum::ImprecisionSpec;
use crate::witness::{distinct_strategies, lhs_bound, DeterministicStrategy, Witness};

/// Solver tolerance used by the relaxations.
pub const RELAX_TOL: f64 = 1e-9;

/// Moment basis for a witness at the given monomial level.
pub fn witness_basis(w: &Witness, level: usize, seed: u64) -> Result<MomentBasis> {
    build_basis(w.dim(), &MonomialList::witness(w.n_y(), level), w.targets(), seed)
}

/// Rows that make one moment matrix Γ = Σ_j y_j Q_j live in the problem's variable vector.
pub(crate) struct MomentBlock<'a> {
    pub basis: &'a MomentBasis,
    pub offset: usize,
}

impl<'a> MomentBlock<'a> {
    /// Row for Re Γ_{u,v} in a problem with `m` variables.
    pub fn entry(&self, m: usize, u: usize, v: usize) -> Vec<f64> {
        let mut row = vec![0.0; m];
        for (j, val) in self.basis.entry_row(u, v).into_iter().enumerate() {
            row[self.offset + j] = val;
        }
        row
    }

    /// Γ ⪰ 0 restricted to the samples' joint range.
    pub fn psd(&self) -> Result<LmiBlock> {
        let basis = self.basis;
        let v = basis.range();
        if v.ncols() == 0 {
            return Err(numerical("moment matrix range is empty"));
        }
        let mut block = LmiBlock::new(v.ncols());
        for j in 0..basis.num_variables() {
            let q = v.adjoint() * basis.element(j) * v;
            let q = (&q + q.adjoint()) * c(0.5, 0.0);
            block.add_term(self.offset + j, q);
        }
        Ok(block)
    }
}

/// Inputs whose lab measurement must equal the target.
pub(crate) fn exact_settings(spec: &ImprecisionSpec) -> Vec<bool> {
    (0..spec.n_y()).map(|y| spec.get(0, y).min(spec.get(1, y)) == 0.0).collect()
}

/// Per-outcome fidelity rows: Re Γ_{T_{b|y}, B_{b|y}} ≥ r(1 − ε_{by})·q, with q = Γ_{𝟙,𝟙}/d.
/// Exact settings add no rows; the basis must be pinned for them.
pub(crate) fn fidelity_constraints(
    block: &MomentBlock,
    m: usize,
    spec: &ImprecisionSpec,
    rank: f64,
) -> Result<Vec<LinearConstraint>> {
    let basis = block.basis;
    let exact = exact_settings(spec);
    if !basis.is_pinned_to(&exact) {
        return Err(invalid("moment basis is not pinned to the exact settings of the spec"));
    }
    let d = basis.d as f64;
    let id = 0;
    let mut ineq = Vec::new();
    for y in (0..spec.n_y()).filter(|&y| !exact[y]) {
        for b in 0..2u8 {
            let t = basis.index(&[Letter::Targ { b, y: y as u8 }])?;
            let l = basis.index(&[Letter::Lab { b, y: y as u8 }])?;
            // r(1−ε)·Γ_00/d − Γ_TB ≤ 0
            let mut row = block.entry(m, id, id).iter().map(|v| v * rank * (1.0 - spec.get(b as usize, y)) / d).collect::<Vec<_>>();
            for (x, v) in row.iter_mut().zip(block.entry(m, t, l)) {
                *x -= v;
            }
            ineq.push(LinearConstraint::new(row, 0.0));
        }
    }
    Ok(ineq)
}

fn target_rank(basis: &MomentBasis) -> f64 {
    (basis.d / 2).max(1) as f64
}

fn check_basis(w: &Witness, basis: &MomentBasis) -> Result<()> {
    if basis.d != w.dim() {
        return Err(invalid(format!("basis dimension {} differs from the witness dimension {}", basis.d, w.dim())));
    }
    basis.index(&[Letter::State])?;
    Ok(())
}

/// Upper bound α^λ on one strategy's value over ε-imprecise lab measurements.
pub fn witness_bound_sdp(
    w: &Witness,
    strategy: &DeterministicStrategy,
    spec: &ImprecisionSpec,
    basis: &MomentBasis,
) -> Result<f64> {
    let k = w.strategy_weights(strategy);
    Ok(strategy_sdp(w, &k, spec, basis)?.objective)
}

fn strategy_sdp(w: &Witness, k: &[[f64; 2]], spec: &ImprecisionSpec, basis: &MomentBasis) -> Result<SdpSolution> {
    check_basis(w, basis)?;
    if spec.n_y() != w.n_y() {
        return Err(invalid("imprecision spec does not match the witness targets"));
    }
    let pinned = basis.pinned_to(&exact_settings(spec))?;
    let basis = &pinned;
    let m = basis.num_variables();
    let block = MomentBlock { basis, offset: 0 };
    let mut p = SdpProblem::new(m);
    let sigma = basis.index(&[Letter::State])?;
    for (y, ky) in k.iter().enumerate() {
        for b in 0..2u8 {
            if ky[b as usize] == 0.0 {
                continue;
            }
            let l = basis.index(&[Letter::Lab { b, y: y as u8 }])?;
            for (o, v) in p.objective.iter_mut().zip(block.entry(m, sigma, l)) {
                *o += ky[b as usize] * v;
            }
        }
    }
    let ineq = fidelity_constraints(&block, m, spec, target_rank(basis))?;
    p.blocks.push(block.psd()?);
    p.equalities.push(LinearConstraint::new(block.entry(m, 0, 0), basis.d as f64));
    p.inequalities.extend(ineq);
    let sol = sdp_solve(&p, RELAX_TOL)?;
    if !sol.is_optimal() {
        return Err(numerical(format!("strategy relaxation ended with status {:?}", sol.status)));
    }
    Ok(sol)
}

/// Bound over all strategies with the per-strategy values.
#[derive(Clone, Debug, Serialize)]
pub struct RelaxationSolution {
    pub bound: f64,
    pub per_strategy: Vec<(Vec<usize>, f64)>,
    pub iterations: usize,
    pub max_duality_gap: f64,
}

/// max_λ α^λ over distinct strategies.
pub fn relaxation_bound(w: &Witness, spec: &ImprecisionSpec, basis: &MomentBasis) -> Result<RelaxationSolution> {
    let strategies = distinct_strategies(w)?;
    let results: Vec<Result<(Vec<usize>, SdpSolution)>> = strategies
        .par_iter()
        .enumerate()
        .map(|(i, (s, _, _))| {
            strategy_sdp(w, &w.strategy_weights(s), spec, basis)
                .map(|sol| (s.outputs(), sol))
                .map_err(|e| Error::Strategy { index: i, source: Box::new(e) })
        })
        .collect();
    let mut out = RelaxationSolution { bound: f64::NEG_INFINITY, per_strategy: Vec::new(), iterations: 0, max_duality_gap: 0.0 };
    for r in results {
        let (outputs, sol) = r?;
        out.bound = out.bound.max(sol.objective);
        out.iterations += sol.iterations;
        out.max_duality_gap = out.max_duality_gap.max(sol.duality_gap);
        out.per_strategy.push((outputs, sol.objective));
    }
    Ok(out)
}

/// Largest ε_Z keeping the relaxation bound at β₀, for fixed (ε_X, ε_Y).
///
/// Bisection on [0, 0.05] to 1e−7; returns 0 when the bound already exceeds
/// β₀ at ε_Z = 0.
pub fn plateau_sdp(w: &Witness, eps_x: f64, eps_y: f64, basis: &MomentBasis) -> Result<f64> {
    if w.n_y() != 3 {
        return Err(invalid("plateau surfaces need a three-target witness"));
    }
    let beta0 = lhs_bound(w)?;
    let strategies = distinct_strategies(w)?;
    let exceeds = |ez: f64| -> Result<bool> {
        let spec = ImprecisionSpec::per_setting(&[eps_x, eps_y, ez])?;
        for (i, (s, _, _)) in strategies.iter().enumerate() {
            let sol = strategy_sdp(w, &w.strategy_weights(s), &spec, basis)
                .map_err(|e| Error::Strategy { index: i, source: Box::new(e) })?;
            if sol.objective > beta0 + 1e-6 {
                return Ok(true);
            }
        }
        Ok(false)
    };
    if exceeds(0.0)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 0.05);
    if !exceeds(hi)? {
        return Ok(hi);
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Real symmetric matrix of Γ at coordinates `y` (for diagnostics).
pub fn gamma_real(basis: &MomentBasis, y: &[f64]) -> DMatrix<f64> {
    basis.gamma(y).map(|z| z.re)
}
