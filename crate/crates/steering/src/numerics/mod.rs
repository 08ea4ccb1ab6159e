//! Dense complex linear algebra and a small dense SDP solver.

pub mod linalg;
pub mod sdp;

pub use linalg::{hermitian_basis, 
    eig_max, eig_max_of, kron, partial_trace, ComplexMatrix, ComplexVector, HermitianOperator, Subsystem, C64,
};
pub use sdp::{sdp_solve, LinearConstraint, LmiBlock, SdpProblem, SdpSettings, SdpSolution, SdpStatus};
