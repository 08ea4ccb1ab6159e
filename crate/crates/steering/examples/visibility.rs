//! Noise robustness of the triangle correlations on |φ⁺⟩ with imprecise Bob
//! measurements: critical visibility and the plateau in ε.
//!
//! The level-2 program takes a few seconds per solve.

use imprecise_steering::quantum::{max_entangled, observable_from_bloch, BlochVector, ImprecisionSpec, Observable};
use imprecise_steering::relax::{
    build_basis, visibility_assemblage, visibility_plateau, visibility_sdp, CorrelationTable, MonomialList,
};

fn main() -> imprecise_steering::Result<()> {
    let h = 3f64.sqrt() / 2.0;
    let dirs = [[1.0, 0.0, 0.0], [-0.5, 0.0, h], [-0.5, 0.0, -h]];
    let obs: Vec<Observable> =
        dirs.iter().map(|d| observable_from_bloch(&BlochVector::unit(*d))).collect::<Result<_, _>>()?;
    let p = CorrelationTable::from_state(&max_entangled(2)?, &obs, &obs)?;

    println!("ideal visibility (assemblage program): {:.8}", visibility_assemblage(&p, &obs)?);
    let basis = build_basis(2, &MonomialList::witness(3, 2), &obs, 7)?;
    for eps in [0.0, 0.01, 0.03] {
        println!("eps={eps}: v = {:.8}", visibility_sdp(&p, &ImprecisionSpec::uniform(3, eps)?, &basis)?);
    }
    println!("plateau length: {:.5}", visibility_plateau(&p, &basis, 0.05)?);
    Ok(())
}
