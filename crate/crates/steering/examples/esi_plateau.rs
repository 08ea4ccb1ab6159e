//! The imprecision plateau of the elegant inequality, computed five ways.

use imprecise_steering::plateau::{
    bisect_plateau, epsilon_star_esi, f_eps, grid_oracle_class2, lemma_witness_bound, seesaw, taylor_plateau,
};
use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::witness::esi_witness;

fn main() -> imprecise_steering::Result<()> {
    let star = epsilon_star_esi();
    let root = bisect_plateau(|e| f_eps(e).unwrap(), 1.0, 0.0, 0.01, 1e-15);
    println!("eps* closed form {star:.12}  bisection {root:.12}");

    let w = esi_witness();
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "eps", "f(eps)", "lemma", "seesaw", "grid");
    for eps in [1e-4, 1e-3, 3e-3, 1e-2] {
        let spec = ImprecisionSpec::uniform(3, eps)?;
        println!(
            "{eps:>8} {:>12.9} {:>12.9} {:>12.9} {:>12.9}",
            f_eps(eps)?.max(1.0),
            lemma_witness_bound(&w, &spec)?,
            seesaw(&w, &spec, 4)?,
            grid_oracle_class2(&spec, 200)?.max(1.0)
        );
    }

    println!("eps_Z plateau from the expansion:");
    for (ex, ey) in [(0.0, 0.0), (star, star), (0.005, 0.0), (0.01, 0.01)] {
        println!("    eps_X={ex:.5} eps_Y={ey:.5}  eps_Z*={:.6}", taylor_plateau(ex, ey)?);
    }
    Ok(())
}
