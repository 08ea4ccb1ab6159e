//! Quantum objects: ±1 observables, Bloch vectors, anticommuting target
//! sets, entangled and isotropic states, assemblages and the imprecision
//! checks that compare a lab measurement with its target.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numerics::linalg::{c, kron, partial_trace_matrix, ComplexMatrix, ComplexVector, HermitianOperator, Subsystem};

/// Tolerance for O² = I.
pub const OBSERVABLE_TOL: f64 = 1e-10;
/// Tolerance on minimum eigenvalues when checking positivity.
pub const PSD_TOL: f64 = 1e-10;

/// A Hermitian operator with eigenvalues ±1.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    op: HermitianOperator,
}

impl Observable {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let sq = HermitianOperator::symmetrized(op.product(&op));
        let dev = sq.max_abs_diff(&HermitianOperator::identity(op.dim()));
        if dev > OBSERVABLE_TOL {
            return Err(invalid(format!("observable does not square to identity (deviation {dev:.3e})")));
        }
        Ok(Self { op })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Spectral projector (I + (−1)^b O)/2 onto outcome b.
    pub fn projector(&self, b: usize) -> HermitianOperator {
        let sign = if b == 0 { 0.5 } else { -0.5 };
        &HermitianOperator::identity(self.dim()).scale(0.5) + &self.op.scale(sign)
    }

    pub fn transpose(&self) -> Self {
        Self { op: self.op.transpose() }
    }

    pub fn negated(&self) -> Self {
        Self { op: self.op.scale(-1.0) }
    }

    pub fn tensor(&self, other: &Observable) -> Self {
        Self { op: kron(&self.op, &other.op) }
    }
}

/// A real 3-vector of norm at most one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        let v = Self(n);
        if v.norm() > 1.0 + 1e-12 {
            return Err(invalid(format!("Bloch vector has norm {} > 1", v.norm())));
        }
        Ok(v)
    }

    /// Normalizes any non-zero vector.
    pub fn unit(n: [f64; 3]) -> Self {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        Self([n[0] / norm, n[1] / norm, n[2] / norm])
    }

    /// Polar angle θ from +z and azimuth φ.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// n·σ for an arbitrary real 3-vector.
pub fn bloch_operator(n: [f64; 3]) -> HermitianOperator {
    let m = ComplexMatrix::from_row_slice(
        2,
        2,
        &[c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0)],
    );
    HermitianOperator::symmetrized(m)
}

/// Extremal qubit observable n·σ for a unit Bloch vector.
pub fn observable_from_bloch(n: &BlochVector) -> Result<Observable> {
    if (n.norm() - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("extremal observable needs a unit Bloch vector, norm is {}", n.norm())));
    }
    Ok(Observable { op: bloch_operator(n.0) })
}

/// Bloch vector of a qubit observable: n_k = tr(O σ_k)/2.
pub fn bloch_of(op: &HermitianOperator) -> [f64; 3] {
    let paulis = [HermitianOperator::pauli_x(), HermitianOperator::pauli_y(), HermitianOperator::pauli_z()];
    [op.inner(&paulis[0]) / 2.0, op.inner(&paulis[1]) / 2.0, op.inner(&paulis[2]) / 2.0]
}

/// n pairwise anticommuting ±1 observables in dimension 2^⌊n/2⌋.
///
/// Built recursively: S₀ = {[1]} and S_{k+1} = {P ⊗ X : P ∈ S_k} ∪ {I ⊗ Y, I ⊗ Z},
/// truncated to the first n elements. This gives {X, Y, Z} for n = 3 and
/// {X⊗X, Y⊗X, Z⊗X, I⊗Y} for n = 4.
pub fn anticommuting_set(n: usize) -> Result<Vec<Observable>> {
    if n == 0 {
        return Err(invalid("anticommuting set needs n ≥ 1"));
    }
    // 2^⌊n/2⌋ needs ⌊n/2⌋ qubit factors; n = 1 still uses one qubit.
    let qubits = (n / 2).max(1);
    let x = HermitianOperator::pauli_x();
    let y = HermitianOperator::pauli_y();
    let z = HermitianOperator::pauli_z();
    let mut set = vec![HermitianOperator::identity(1)];
    for _ in 0..qubits {
        let id = HermitianOperator::identity(set[0].dim());
        let mut next: Vec<HermitianOperator> = set.iter().map(|p| kron(p, &x)).collect();
        next.push(kron(&id, &y));
        next.push(kron(&id, &z));
        set = next;
    }
    let mut out = Vec::with_capacity(n);
    for op in set.into_iter().take(n) {
        out.push(Observable::new(op)?);
    }
    if out.len() < n {
        return Err(invalid(format!("could not build {n} anticommuting observables")));
    }
    Ok(out)
}

/// Σ_k |kk⟩/√d.
pub fn max_entangled_vector(d: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        v[k * d + k] = c(amp, 0.0);
    }
    v
}

/// Projector onto the maximally entangled state of two d-level systems.
pub fn max_entangled(d: usize) -> Result<HermitianOperator> {
    if d < 2 {
        return Err(invalid("maximally entangled state needs d ≥ 2"));
    }
    Ok(HermitianOperator::projector(&max_entangled_vector(d)))
}

/// v|φ⁺⟩⟨φ⁺| + (1 − v) I/d².
pub fn isotropic_state(v: f64, d: usize) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&v) {
        return Err(invalid(format!("visibility {v} outside [0, 1]")));
    }
    let phi = max_entangled(d)?;
    let noise = HermitianOperator::identity(d * d).scale((1.0 - v) / (d * d) as f64);
    Ok(&phi.scale(v) + &noise)
}

/// How imprecision between lab and target measurements is quantified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    /// tr(B_{b|y} B^targ_{b|y}) ≥ r(1 − ε_{by}).
    Fidelity,
    /// ‖{B_y, B_y'}‖ ≤ ε for all pairs of lab observables.
    Anticommutator,
}

/// Per-outcome, per-setting imprecision parameters; `eps[y][b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprecisionSpec {
    pub quantifier: Quantifier,
    pub eps: Vec<[f64; 2]>,
}

impl ImprecisionSpec {
    pub fn new(quantifier: Quantifier, eps: Vec<[f64; 2]>) -> Result<Self> {
        for (y, e) in eps.iter().enumerate() {
            for (b, &v) in e.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(invalid(format!("ε for (b={b}, y={y}) is {v}, outside [0, 1]")));
                }
            }
        }
        Ok(Self { quantifier, eps })
    }

    /// The same fidelity ε for every outcome of every setting.
    pub fn uniform(n_y: usize, eps: f64) -> Result<Self> {
        Self::new(Quantifier::Fidelity, vec![[eps, eps]; n_y])
    }

    /// One fidelity ε per setting, shared by both outcomes.
    pub fn per_setting(eps: &[f64]) -> Result<Self> {
        Self::new(Quantifier::Fidelity, eps.iter().map(|&e| [e, e]).collect())
    }

    pub fn exact(n_y: usize) -> Self {
        Self { quantifier: Quantifier::Fidelity, eps: vec![[0.0, 0.0]; n_y] }
    }

    pub fn n_y(&self) -> usize {
        self.eps.len()
    }

    pub fn get(&self, b: usize, y: usize) -> f64 {
        self.eps[y][b]
    }

    pub fn is_exact(&self) -> bool {
        self.eps.iter().all(|e| e[0] == 0.0 && e[1] == 0.0)
    }
}

/// Whether a lab observable respects its imprecision bound for outcome b of setting y.
///
/// Only meaningful for the fidelity quantifier; the anticommutator condition
/// concerns a whole set of lab observables, see [`check_anticommutators`].
pub fn check_imprecision(
    lab: &Observable,
    targ: &Observable,
    spec: &ImprecisionSpec,
    (b, y): (usize, usize),
) -> Result<bool> {
    if lab.dim() != targ.dim() {
        return Err(invalid(format!("lab dimension {} differs from target dimension {}", lab.dim(), targ.dim())));
    }
    if y >= spec.n_y() || b > 1 {
        return Err(invalid(format!("no imprecision parameter for (b={b}, y={y})")));
    }
    match spec.quantifier {
        Quantifier::Fidelity => {
            let pl = lab.projector(b);
            let pt = targ.projector(b);
            let r = pt.trace();
            Ok(pl.inner(&pt) >= r * (1.0 - spec.get(b, y)) - 1e-12)
        }
        Quantifier::Anticommutator => {
            Err(invalid("the anticommutator quantifier constrains sets of lab observables; use check_anticommutators"))
        }
    }
}

/// ‖{B_j, B_k}‖_∞ ≤ ε for every pair j ≠ k.
pub fn check_anticommutators(labs: &[Observable], eps: f64) -> Result<bool> {
    for j in 0..labs.len() {
        for k in (j + 1)..labs.len() {
            if labs[j].dim() != labs[k].dim() {
                return Err(invalid("lab observables of different dimensions"));
            }
            if labs[j].op().anticommutator(labs[k].op()).operator_norm() > eps + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Bob's conditional states σ_{a|x}; `members[x][a]`.
#[derive(Clone, Debug)]
pub struct Assemblage {
    members: Vec<[HermitianOperator; 2]>,
}

impl Assemblage {
    pub fn new(members: Vec<[HermitianOperator; 2]>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("assemblage needs at least one input"));
        }
        let rho = &members[0][0] + &members[0][1];
        if (rho.trace() - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("assemblage has total trace {}", rho.trace())));
        }
        for (x, pair) in members.iter().enumerate() {
            for (a, s) in pair.iter().enumerate() {
                if s.dim() != rho.dim() {
                    return Err(invalid("assemblage members have different dimensions"));
                }
                if !s.is_psd(PSD_TOL) {
                    return Err(invalid(format!("σ_(a={a}|x={x}) is not positive semidefinite")));
                }
            }
            if (&pair[0] + &pair[1]).max_abs_diff(&rho) > 1e-10 {
                return Err(invalid(format!("input {x} signals: marginal differs from input 0")));
            }
        }
        Ok(Self { members })
    }

    pub fn member(&self, a: usize, x: usize) -> &HermitianOperator {
        &self.members[x][a]
    }

    pub fn n_x(&self) -> usize {
        self.members.len()
    }

    pub fn dim(&self) -> usize {
        self.members[0][0].dim()
    }

    /// Bob's reduced state Σ_a σ_{a|x}.
    pub fn marginal(&self) -> HermitianOperator {
        &self.members[0][0] + &self.members[0][1]
    }
}

/// σ_{a|x} = tr_A((A_{a|x} ⊗ I) ρ) with A_{a|x} = (I ± A_x)/2.
pub fn assemblage_from(state: &HermitianOperator, alice: &[Observable]) -> Result<Assemblage> {
    if alice.is_empty() {
        return Err(invalid("need at least one Alice observable"));
    }
    let da = alice[0].dim();
    if state.dim() % da != 0 {
        return Err(invalid(format!("state dimension {} not divisible by {da}", state.dim())));
    }
    let db = state.dim() / da;
    let id_b = HermitianOperator::identity(db);
    let mut members = Vec::with_capacity(alice.len());
    for obs in alice {
        if obs.dim() != da {
            return Err(invalid("Alice observables have different dimensions"));
        }
        let mut pair = Vec::with_capacity(2);
        for a in 0..2 {
            let op = kron(&obs.projector(a), &id_b);
            let m = partial_trace_matrix(&op.product(state), (da, db), Subsystem::A)?;
            pair.push(HermitianOperator::symmetrized(m));
        }
        let s1 = pair.pop().unwrap();
        let s0 = pair.pop().unwrap();
        members.push([s0, s1]);
    }
    Assemblage::new(members)
}

/// Gaussian-normalized complex vector (Haar-random pure state).
pub fn random_state_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / c(n, 0.0)
}

/// Uniform point on the unit sphere.
pub fn random_bloch<R: Rng + ?Sized>(rng: &mut R) -> BlochVector {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-8 {
            return BlochVector::unit(v);
        }
    }
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q;
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / c(diag.norm(), 0.0) } else { c(1.0, 0.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// Haar-conjugated observable with `plus` eigenvalues +1 and the rest −1.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, d: usize, plus: usize) -> Observable {
    let diag: Vec<f64> = (0..d).map(|k| if k < plus { 1.0 } else { -1.0 }).collect();
    let u = random_unitary(rng, d);
    Observable { op: HermitianOperator::diagonal(&diag).conjugate_by(&u) }
}

/// Random real orthogonal basis completion helper: returns an orthonormal basis of
/// the orthogonal complement of the given columns in C^d.
pub fn orthogonal_complement(cols: &ComplexMatrix) -> ComplexMatrix {
    let d = cols.nrows();
    let proj = cols * cols.adjoint();
    let resid = ComplexMatrix::identity(d, d) - proj;
    let h = HermitianOperator::symmetrized(resid);
    let (vals, vecs) = h.eigen();
    let keep: Vec<usize> = (0..d).filter(|&k| vals[k] > 0.5).collect();
    let mut out = ComplexMatrix::zeros(d, keep.len());
    for (j, &k) in keep.iter().enumerate() {
        out.set_column(j, &vecs.column(k));
    }
    out
}

/// Dense real matrix of inner products ⟨O_i, O_j⟩ used for quick diagnostics.
pub fn gram(ops: &[HermitianOperator]) -> DMatrix<f64> {
    DMatrix::from_fn(ops.len(), ops.len(), |i, j| ops[i].inner(&ops[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_element_set_matches_reference_choice() {
        let set = anticommuting_set(4).unwrap();
        let x = HermitianOperator::pauli_x();
        let y = HermitianOperator::pauli_y();
        let z = HermitianOperator::pauli_z();
        let id = HermitianOperator::identity(2);
        let expected = [kron(&x, &x), kron(&y, &x), kron(&z, &x), kron(&id, &y)];
        for (got, want) in set.iter().zip(expected.iter()) {
            assert!(got.op().max_abs_diff(want) < 1e-15);
        }
    }

    #[test]
    fn three_element_set_is_paulis() {
        let set = anticommuting_set(3).unwrap();
        assert!(set[0].op().max_abs_diff(&HermitianOperator::pauli_x()) < 1e-15);
        assert!(set[1].op().max_abs_diff(&HermitianOperator::pauli_y()) < 1e-15);
        assert!(set[2].op().max_abs_diff(&HermitianOperator::pauli_z()) < 1e-15);
    }

    #[test]
    fn cone_boundary_passes_with_equality() {
        let eps: f64 = 0.01;
        let theta = (1.0 - 2.0 * eps).acos();
        let lab = observable_from_bloch(&BlochVector::from_angles(theta, 0.3)).unwrap();
        let targ = observable_from_bloch(&BlochVector([0.0, 0.0, 1.0])).unwrap();
        let spec = ImprecisionSpec::uniform(1, eps).unwrap();
        assert!(check_imprecision(&lab, &targ, &spec, (0, 0)).unwrap());
        let tighter = ImprecisionSpec::uniform(1, eps * 0.99).unwrap();
        assert!(!check_imprecision(&lab, &targ, &tighter, (0, 0)).unwrap());
    }
}
