//! Dense complex linear algebra on Hermitian operators.
//!
//! Everything is double precision. Hermiticity is checked once, at
//! construction, and the stored matrix is symmetrized so later arithmetic
//! never drifts away from the Hermitian subspace.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{invalid, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Largest tolerated max-abs deviation from Hermiticity, relative to the
/// largest entry (or absolute below unit scale).
pub const HERMITIAN_TOL: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    /// Validates squareness and Hermiticity, then stores the symmetrized matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(invalid(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        let scale = matrix.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        if !dev.is_finite() || dev > HERMITIAN_TOL * scale {
            return Err(invalid(format!("matrix is not Hermitian (deviation {dev:.3e})")));
        }
        Ok(Self::symmetrized(matrix))
    }

    /// Skips validation; callers guarantee Hermiticity up to round-off.
    pub(crate) fn symmetrized(matrix: ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        Self { matrix: (matrix + adj) * c(0.5, 0.0) }
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| c(x, 0.0)))
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let d = entries.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for (k, &e) in entries.iter().enumerate() {
            m[(k, k)] = c(e, 0.0);
        }
        Self { matrix: m }
    }

    pub fn pauli_x() -> Self {
        Self { matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]) }
    }

    pub fn pauli_y() -> Self {
        Self { matrix: ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]) }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    /// Rank-one operator |ψ⟩⟨ψ| (no normalization applied).
    pub fn projector(psi: &ComplexVector) -> Self {
        Self::symmetrized(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.matrix[(k, k)].re).sum()
    }

    /// Hilbert-Schmidt inner product tr(self · other), real for Hermitian pairs.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B.
        self.matrix.iter().zip(other.matrix.iter()).map(|(a, b)| (a * b.conj()).re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { matrix: &self.matrix * c(s, 0.0) }
    }

    /// U H U†.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(u * &self.matrix * u.adjoint())
    }

    /// Transpose, which equals the entrywise conjugate for Hermitian operators.
    pub fn transpose(&self) -> Self {
        Self { matrix: self.matrix.transpose() }
    }

    /// Product as a plain matrix (not Hermitian in general).
    pub fn product(&self, other: &Self) -> ComplexMatrix {
        &self.matrix * &other.matrix
    }

    /// {A, B} = AB + BA.
    pub fn anticommutator(&self, other: &Self) -> Self {
        let ab = self.product(other);
        let ba = other.product(self);
        Self::symmetrized(ab + ba)
    }

    /// Eigenvalues in ascending order with matching eigenvector columns.
    pub fn eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = ComplexMatrix::zeros(self.dim(), self.dim());
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> f64 {
        let v = self.eigenvalues();
        v[0].abs().max(v[v.len() - 1].abs())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// ⟨ψ|H|ψ⟩.
    pub fn expectation(&self, psi: &ComplexVector) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real and imaginary parts of the entry (i, j).
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest eigenvalue and a unit eigenvector.
pub fn eig_max(h: &HermitianOperator) -> (f64, ComplexVector) {
    let (values, vectors) = h.eigen();
    let k = values.len() - 1;
    let v = vectors.column(k).into_owned();
    let norm = v.norm();
    (values[k], v / c(norm, 0.0))
}

/// [`eig_max`] for an unchecked matrix; rejects non-Hermitian input.
pub fn eig_max_of(m: &ComplexMatrix) -> Result<(f64, ComplexVector)> {
    Ok(eig_max(&HermitianOperator::new(m.clone())?))
}

pub fn kron_matrix(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator { matrix: a.matrix.kronecker(&b.matrix) }
}

/// Which tensor factor to trace out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of a general matrix on C^dA ⊗ C^dB.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: (usize, usize), over: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if m.nrows() != da * db || m.ncols() != da * db {
        return Err(invalid(format!(
            "partial trace: matrix is {}x{}, dims ({da}, {db})",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match over {
        Subsystem::A => ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
    })
}

pub fn partial_trace(m: &HermitianOperator, dims: (usize, usize), over: Subsystem) -> Result<HermitianOperator> {
    Ok(HermitianOperator::symmetrized(partial_trace_matrix(&m.matrix, dims, over)?))
}

/// Normalizes a complex vector in place and returns it.
pub fn normalized(v: ComplexVector) -> ComplexVector {
    let n = v.norm();
    v / c(n, 0.0)
}

/// Real symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.
pub fn real_embedding(m: &ComplexMatrix) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Orthonormal basis of the d×d Hermitian matrices under the trace inner product.
pub fn hermitian_basis(d: usize) -> Vec<HermitianOperator> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = c(1.0, 0.0);
        out.push(HermitianOperator { matrix: m });
        for j in (i + 1)..d {
            let mut re = ComplexMatrix::zeros(d, d);
            re[(i, j)] = c(s, 0.0);
            re[(j, i)] = c(s, 0.0);
            out.push(HermitianOperator { matrix: re });
            let mut im = ComplexMatrix::zeros(d, d);
            im[(i, j)] = c(0.0, -s);
            im[(j, i)] = c(0.0, s);
            out.push(HermitianOperator { matrix: im });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_sum_has_sqrt3_top_eigenvalue() {
        let h = &(&HermitianOperator::pauli_x() + &HermitianOperator::pauli_y()) + &HermitianOperator::pauli_z();
        let (v, vec) = eig_max(&h);
        assert!((v - 3f64.sqrt()).abs() < 1e-12);
        let resid = (h.matrix() * &vec - &vec * c(v, 0.0)).norm();
        assert!(resid < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
        assert!(HermitianOperator::new(m.clone()).is_err());
        assert!(eig_max_of(&m).is_err());
    }

    #[test]
    fn partial_trace_of_product() {
        let x = HermitianOperator::pauli_x();
        let z = HermitianOperator::pauli_z();
        let xz = kron(&x, &(&z + &HermitianOperator::identity(2)));
        let ra = partial_trace(&xz, (2, 2), Subsystem::B).unwrap();
        assert!(ra.max_abs_diff(&x.scale(2.0)) < 1e-14);
        let rb = partial_trace(&xz, (2, 2), Subsystem::A).unwrap();
        assert!(rb.max_abs_diff(&HermitianOperator::zeros(2)) < 1e-14);
    }

    #[test]
    fn embedding_preserves_spectrum() {
        let y = HermitianOperator::pauli_y();
        let e = real_embedding(y.matrix());
        let mut ev: Vec<f64> = e.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[3] - 1.0).abs() < 1e-14);
    }
}
