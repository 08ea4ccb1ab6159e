//! Sampled moment-matrix relaxation: per-strategy bounds and the ε_Z plateau.

use imprecise_steering::plateau::{epsilon_star_esi, f_eps};
use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::relax::{plateau_sdp, relaxation_bound, witness_basis};
use imprecise_steering::witness::esi_witness;

fn main() -> imprecise_steering::Result<()> {
    let w = esi_witness();
    let basis = witness_basis(&w, 1, 7)?;
    let shape = basis.shape();
    println!("level 1: side {}, {} variables", shape.side, shape.variables);

    let spec = ImprecisionSpec::uniform(3, 2e-3)?;
    let sol = relaxation_bound(&w, &spec, &basis)?;
    for (outputs, bound) in sol.per_strategy.iter().filter(|(_, b)| *b > 0.5) {
        println!("    strategy {outputs:?}: {bound:.9}");
    }
    println!("bound {:.9} (class-2 closed form {:.9})", sol.bound, f_eps(2e-3)?);

    let star = epsilon_star_esi();
    println!("eps_Z plateau at (eps*, eps*): {:.7}  (eps* = {star:.7})", plateau_sdp(&w, star, star, &basis)?);
    println!("eps_Z plateau at (0, 0):       {:.7}", plateau_sdp(&w, 0.0, 0.0, &basis)?);
    Ok(())
}
