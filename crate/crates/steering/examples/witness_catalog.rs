//! LHS structure of the built-in witnesses: strategy classes, local bounds,
//! quantum values and the projector identity behind the family bound.

use imprecise_steering::witness::{
    builtin, enumerate_strategies, family_projector_matrix, has_plateau, lhs_bound, quantum_value,
};

fn main() -> imprecise_steering::Result<()> {
    for name in ["esi", "pauli", "family4", "dodecahedron"] {
        let w = builtin(name)?;
        let classes = enumerate_strategies(&w)?;
        println!(
            "{name}: {} inputs, {} targets, d={}  beta0={:.6}  Q={:.6}  plateau={}",
            w.n_x(),
            w.n_y(),
            w.dim(),
            lhs_bound(&w)?,
            quantum_value(&w)?.value,
            has_plateau(&w)?
        );
        for c in classes.iter().filter(|_| w.n_y() <= 4) {
            println!("    |t| = {:?}  value {:.6}  ({} strategies)", c.pattern(), c.value, c.count);
        }
    }

    // S² = n_X·S for the ±1 sign matrix of the family
    for n in 3..=6 {
        let s = family_projector_matrix(n);
        let k = s.len();
        let ok = (0..k).all(|i| {
            (0..k).all(|j| (0..k).map(|l| s[i][l] * s[l][j]).sum::<i64>() == k as i64 * s[i][j])
        });
        println!("family{n}: S is {k}x{k}, S^2 = {k} S: {ok}");
    }
    Ok(())
}
