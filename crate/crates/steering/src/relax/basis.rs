use std::collections::HashMap;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::monomials::{Letter, MonomialList};
use crate::error::{invalid, numerical, Result};
use crate::numerics::linalg::{c, kron, partial_trace_matrix, ComplexMatrix, HermitianOperator, Subsystem};
use crate::quantum::{random_observable, random_state_vector, Observable};

/// Relative singular-value threshold for linear dependence of samples.
pub const DEPENDENCE_TOL: f64 = 1e-9;
/// Consecutive dependent samples that close the basis.
const CLOSING_MISSES: usize = 2;

/// Span of sampled tracial moment matrices Γ_{u,v} = tr(u†v).
#[derive(Clone, Debug)]
pub struct MomentBasis {
    pub d: usize,
    pub monomials: MonomialList,
    pub seed: u64,
    /// Samples kept in the basis (linearly independent).
    pub samples: Vec<ComplexMatrix>,
    /// Samples drawn in total, including the dependent ones that closed the basis.
    pub samples_drawn: usize,
    /// Bob inputs whose lab measurement is held at the target in every sample.
    pub pinned: Vec<bool>,
    targets: Vec<Observable>,
    /// Frobenius-orthonormal basis of the same span.
    orthonormal: Vec<ComplexMatrix>,
    /// Orthonormal columns spanning the union of the samples' ranges.
    range: ComplexMatrix,
}

/// Sizes reported for a relaxation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BasisShape {
    pub side: usize,
    pub variables: usize,
    pub reduced_side: usize,
}

impl MomentBasis {
    pub fn side(&self) -> usize {
        self.monomials.side()
    }

    /// Number of free coefficients s_i.
    pub fn num_variables(&self) -> usize {
        self.orthonormal.len()
    }

    pub fn shape(&self) -> BasisShape {
        BasisShape { side: self.side(), variables: self.num_variables(), reduced_side: self.range.ncols() }
    }

    /// Orthonormal element j of the span.
    pub fn element(&self, j: usize) -> &ComplexMatrix {
        &self.orthonormal[j]
    }

    pub fn range(&self) -> &ComplexMatrix {
        &self.range
    }

    /// Real part of entry (u, v) as a linear function of the orthonormal coordinates.
    pub fn entry_row(&self, u: usize, v: usize) -> Vec<f64> {
        self.orthonormal.iter().map(|q| q[(u, v)].re).collect()
    }

    /// Imaginary part of entry (u, v) as a linear function of the coordinates.
    pub fn entry_row_im(&self, u: usize, v: usize) -> Vec<f64> {
        self.orthonormal.iter().map(|q| q[(u, v)].im).collect()
    }

    /// Γ for orthonormal coordinates `y`.
    pub fn gamma(&self, y: &[f64]) -> ComplexMatrix {
        let n = self.side();
        let mut g = ComplexMatrix::zeros(n, n);
        for (q, yj) in self.orthonormal.iter().zip(y) {
            g += q * c(*yj, 0.0);
        }
        g
    }

    /// Coordinates of a sample in the orthonormal basis.
    pub fn coordinates(&self, gamma: &ComplexMatrix) -> Vec<f64> {
        self.orthonormal.iter().map(|q| frob(q, gamma)).collect()
    }

    /// The same list and seed resampled with the lab measurement of every
    /// input `y` with `exact[y]` held at its target; returns a clone when
    /// the pinning already matches.
    pub fn pinned_to(&self, exact: &[bool]) -> Result<MomentBasis> {
        if self.is_pinned_to(exact) {
            return Ok(self.clone());
        }
        build_basis_pinned(self.d, &self.monomials, &self.targets, exact, self.seed)
    }

    pub fn is_pinned_to(&self, exact: &[bool]) -> bool {
        let n = exact.len().max(self.pinned.len());
        (0..n).all(|y| exact.get(y).copied().unwrap_or(false) == self.pinned.get(y).copied().unwrap_or(false))
    }

    /// Index of a reduced word in the monomial list.
    pub fn index(&self, word: &[Letter]) -> Result<usize> {
        self.monomials.index_of(word).ok_or_else(|| invalid(format!("monomial {word:?} not in the list")))
    }
}

fn frob(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

/// Draws one operator per letter and returns them keyed by letter.
fn sample_letters(
    rng: &mut ChaCha8Rng,
    d: usize,
    letters: &[Letter],
    targets: &[Observable],
    pinned: &[bool],
) -> Result<HashMap<Letter, ComplexMatrix>> {
    let mut ops: HashMap<Letter, ComplexMatrix> = HashMap::new();
    let id = ComplexMatrix::identity(d, d);
    ops.insert(Letter::Id, id.clone());
    let half = (d / 2).max(1);
    let members: Vec<(u8, u8)> =
        letters.iter().filter_map(|l| if let Letter::Member { a, x } = l { Some((*a, *x)) } else { None }).collect();
    let shared = if members.is_empty() {
        None
    } else {
        Some(HermitianOperator::projector(&random_state_vector(rng, d * d)))
    };
    let mut alice: HashMap<u8, Observable> = HashMap::new();
    for l in letters {
        let op = match *l {
            Letter::Id => continue,
            Letter::State => HermitianOperator::projector(&random_state_vector(rng, d)).into_matrix(),
            Letter::Member { a, x } => {
                let obs = alice.entry(x).or_insert_with(|| random_observable(rng, d, half)).clone();
                let p = kron(&obs.projector(a as usize), &HermitianOperator::identity(d));
                let state = shared.as_ref().unwrap();
                partial_trace_matrix(&p.product(state), (d, d), Subsystem::A)?
            }
            Letter::Targ { b, y } => {
                let t = targets.get(y as usize).ok_or_else(|| invalid(format!("no target {y}")))?;
                t.projector(b as usize).into_matrix()
            }
            Letter::Lab { b, y } if pinned.get(y as usize).copied().unwrap_or(false) => {
                let t = targets.get(y as usize).ok_or_else(|| invalid(format!("no target {y}")))?;
                t.projector(b as usize).into_matrix()
            }
            Letter::Lab { b, y } => {
                if let Some(existing) = ops.get(&Letter::Lab { b: 1 - b, y }) {
                    &id - existing
                } else {
                    random_observable(rng, d, half).projector(b as usize).into_matrix()
                }
            }
        };
        ops.insert(*l, op);
    }
    Ok(ops)
}

fn word_operator(word: &[Letter], ops: &HashMap<Letter, ComplexMatrix>, d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(d, d);
    for l in word {
        m *= &ops[l];
    }
    m
}

/// One sampled moment matrix Γ_{u,v} = tr(u†v).
fn sample_gamma(
    rng: &mut ChaCha8Rng,
    d: usize,
    monomials: &MonomialList,
    targets: &[Observable],
    pinned: &[bool],
) -> Result<ComplexMatrix> {
    let ops = sample_letters(rng, d, &monomials.letters, targets, pinned)?;
    let words: Vec<ComplexMatrix> = monomials.words.iter().map(|w| word_operator(w, &ops, d)).collect();
    let n = words.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: nalgebra::Complex<f64> = words[i].iter().zip(words[j].iter()).map(|(a, b)| a.conj() * b).sum();
            g[(i, j)] = v;
            g[(j, i)] = v.conj();
        }
    }
    Ok(g)
}

/// Samples moment matrices until the next one is linearly dependent on the others.
///
/// Lab projectors are random rank-d/2 projectors, σ is a Haar-random pure state,
/// assemblage members come from a Haar-random two-party pure state measured by
/// random projective measurements; targets stay fixed.
pub fn build_basis(d: usize, monomials: &MonomialList, targets: &[Observable], seed: u64) -> Result<MomentBasis> {
    build_basis_pinned(d, monomials, targets, &[], seed)
}

/// As [`build_basis`], with the lab measurement of each input `y` where
/// `pinned[y]` is set equal to its target in every sample.
pub fn build_basis_pinned(
    d: usize,
    monomials: &MonomialList,
    targets: &[Observable],
    pinned: &[bool],
    seed: u64,
) -> Result<MomentBasis> {
    if d < 1 {
        return Err(invalid("dimension must be positive"));
    }
    if targets.iter().any(|t| t.dim() != d) {
        return Err(invalid("targets do not match the sampling dimension"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = monomials.side();
    let cap = n * n;
    let mut samples = Vec::new();
    let mut orthonormal: Vec<ComplexMatrix> = Vec::new();
    let mut sum = ComplexMatrix::zeros(n, n);
    let mut drawn = 0;
    let mut misses = 0;
    while misses < CLOSING_MISSES {
        let g = sample_gamma(&mut rng, d, monomials, targets, pinned)?;
        drawn += 1;
        let norm = frob(&g, &g).sqrt();
        let mut r = g.clone();
        for _ in 0..2 {
            for q in &orthonormal {
                let p = frob(q, &r);
                r -= q * c(p, 0.0);
            }
        }
        let rn = frob(&r, &r).sqrt();
        if rn > DEPENDENCE_TOL * norm {
            orthonormal.push(r / c(rn, 0.0));
            sum += &g;
            samples.push(g);
            misses = 0;
            if samples.len() > cap {
                return Err(numerical("moment basis keeps growing beyond |S|² samples"));
            }
        } else {
            misses += 1;
        }
    }
    let h = HermitianOperator::symmetrized(sum);
    let (vals, vecs) = h.eigen();
    let top = vals.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > 1e-9 * top).collect();
    let mut range = ComplexMatrix::zeros(n, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        range.set_column(j, &vecs.column(k));
    }
    Ok(MomentBasis {
        d,
        monomials: monomials.clone(),
        seed,
        samples,
        samples_drawn: drawn,
        pinned: pinned.to_vec(),
        targets: targets.to_vec(),
        orthonormal,
        range,
    })
}

/// Side and number of basis elements without storing the moment matrices.
///
/// Entries whose words agree up to cyclic rotation are equal on every sample,
/// so only one entry per trace class is tracked; that keeps large lists
/// (hundreds of monomials) cheap to size.
pub fn basis_shape(d: usize, monomials: &MonomialList, targets: &[Observable], seed: u64) -> Result<BasisShape> {
    let n = monomials.side();
    // word of entry (u, v) is reverse(u) · v, up to cyclic rotation
    let mut classes: HashMap<Vec<Letter>, usize> = HashMap::new();
    let mut reps: Vec<Vec<Letter>> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut w: Vec<Letter> = monomials.words[i].iter().rev().cloned().collect();
            w.extend(monomials.words[j].iter().cloned());
            let key = canonical_trace_word(&w);
            let Some(key) = key else { continue };
            if !classes.contains_key(&key) {
                classes.insert(key.clone(), reps.len());
                reps.push(key);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut misses = 0;
    while misses < CLOSING_MISSES {
        let ops = sample_letters(&mut rng, d, &monomials.letters, targets, &[])?;
        let mut v = DVector::zeros(2 * reps.len());
        for (k, w) in reps.iter().enumerate() {
            let t = word_operator(w, &ops, d).trace();
            v[2 * k] = t.re;
            v[2 * k + 1] = t.im;
        }
        let norm = v.norm();
        for _ in 0..2 {
            for q in &basis {
                let p = q.dot(&v);
                v.axpy(-p, q, 1.0);
            }
        }
        let rn = v.norm();
        if rn > DEPENDENCE_TOL * norm {
            basis.push(v / rn);
            misses = 0;
            if basis.len() > n * n {
                return Err(numerical("moment basis keeps growing beyond |S|² samples"));
            }
        } else {
            misses += 1;
        }
    }
    Ok(BasisShape { side: n, variables: basis.len(), reduced_side: n })
}

/// Reduces a cyclic word (including wrap-around merges) and picks the least rotation.
fn canonical_trace_word(word: &[Letter]) -> Option<Vec<Letter>> {
    let mut w = super::monomials::reduce(word)?;
    while w.len() > 1 {
        let (first, last) = (w[0], w[w.len() - 1]);
        if first == last && !matches!(first, Letter::Member { .. }) {
            w.pop();
            continue;
        }
        if super::monomials::reduce(&[last, first]).is_none() {
            return None;
        }
        break;
    }
    let best = (0..w.len().max(1))
        .map(|r| {
            let mut rot = w[r..].to_vec();
            rot.extend_from_slice(&w[..r]);
            rot
        })
        .min()
        .unwrap_or_default();
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_list_gives_one_element() {
        let b = build_basis(2, &MonomialList::trivial(), &[], 1).unwrap();
        assert_eq!(b.num_variables(), 1);
        assert!((b.samples[0][(0, 0)].re - 2.0).abs() < 1e-14);
    }
}
