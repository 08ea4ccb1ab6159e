//! Critical detection efficiencies with and without imprecision.

use imprecise_steering::plateau::{epsilon_star_esi, lemma_witness_bound};
use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::robustness::{
    detection_sdp_n4, dodecahedron_eta, dodecahedron_eta_ideal, eta_crit_esi, eta_crit_esi_at, eta_crit_n4,
    pauli_eta_search, theta_limit,
};
use imprecise_steering::witness::dodecahedron_witness;

fn main() -> imprecise_steering::Result<()> {
    let star = epsilon_star_esi();
    println!("ESI: eta(θ=π/4) = {:.6}, limit = {:.6}", eta_crit_esi(std::f64::consts::FRAC_PI_4)?, eta_crit_esi_at(0.0)?);
    println!("ESI at eps*: {:.6}", eta_crit_esi_at(star)?);
    println!("Pauli: eps=0 {:.6}, eps* {:.6}", pauli_eta_search(0.0, 1)?.eta, pauli_eta_search(star, 1)?.eta);

    let w = dodecahedron_witness();
    let beta = lemma_witness_bound(&w, &ImprecisionSpec::uniform(w.n_y(), star)?)?;
    println!(
        "dodecahedron: eps=0 {:.6}; eps* bound {beta:.6}, eta {:.6}",
        dodecahedron_eta_ideal(1)?.eta,
        dodecahedron_eta(beta, 1)?.eta
    );

    println!("four-target family: limit {:.6}", theta_limit(eta_crit_n4)?);
    for eta in [0.2, 0.26, 0.5, 1.0] {
        let p = detection_sdp_n4(eta)?;
        println!("    eta={eta}: best value {:.6} (Q={:.6}, C={:.6}) detectable={}", p.value, p.q, p.c, p.detectable);
    }
    Ok(())
}
