//! The dense SDP solver on its own: the largest eigenvalue of a Hermitian
//! matrix as max ⟨H, ρ⟩ over density matrices.

use imprecise_steering::numerics::{hermitian_basis, sdp_solve, ComplexMatrix, LinearConstraint, LmiBlock, SdpProblem, C64};

fn main() -> imprecise_steering::Result<()> {
    let h = ComplexMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(1.0, 0.0), C64::new(0.5, 0.5), C64::new(0.0, 0.0),
            C64::new(0.5, -0.5), C64::new(0.0, 0.0), C64::new(0.0, 1.0),
            C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(-1.0, 0.0),
        ],
    );
    let basis = hermitian_basis(3);
    let mut p = SdpProblem::new(basis.len());
    let mut block = LmiBlock::new(3);
    let mut trace = vec![0.0; basis.len()];
    for (j, e) in basis.iter().enumerate() {
        block.add_term(j, e.matrix().clone());
        p.objective[j] = e.matrix().iter().zip(h.iter()).map(|(a, b)| (a.conj() * b).re).sum();
        trace[j] = e.trace();
    }
    p.blocks.push(block);
    p.equalities.push(LinearConstraint::new(trace, 1.0));
    let sol = sdp_solve(&p, 1e-10)?;
    let eig = h.clone().symmetric_eigenvalues().max();
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("SDP value {:.10}, largest eigenvalue {eig:.10}", sol.objective);
    Ok(())
}
