use imprecise_steering::numerics::{kron, partial_trace, HermitianOperator, Subsystem};
use imprecise_steering::plateau::{f_eps, lemma_bound_t, lemma_operator_bound, seesaw_strategy};
use imprecise_steering::quantum::{
    assemblage_from, check_imprecision, isotropic_state, observable_from_bloch, random_bloch, random_observable,
    BlochVector, ImprecisionSpec,
};
use imprecise_steering::robustness::eta_crit_general;
use imprecise_steering::witness::{esi_witness, evaluate, lhs_bound, quantum_value, tetrahedron_observables, Witness};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn unit(v: [f64; 3]) -> Option<BlochVector> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    (n > 1e-3).then(|| BlochVector::unit([v[0] / n, v[1] / n, v[2] / n]))
}

fn dot(a: &BlochVector, b: &BlochVector) -> f64 {
    a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fidelity_check_matches_bloch_overlap(
        a in prop::array::uniform3(-1.0f64..1.0),
        b in prop::array::uniform3(-1.0f64..1.0),
        eps in 0.0f64..0.5,
    ) {
        let (Some(n), Some(m)) = (unit(a), unit(b)) else { return Ok(()) };
        let lab = observable_from_bloch(&n).unwrap();
        let targ = observable_from_bloch(&m).unwrap();
        let spec = ImprecisionSpec::uniform(1, eps).unwrap();
        let overlap = dot(&n, &m);
        prop_assume!((overlap - (1.0 - 2.0 * eps)).abs() > 1e-9);
        prop_assert_eq!(check_imprecision(&lab, &targ, &spec, (0, 0)).unwrap(), overlap >= 1.0 - 2.0 * eps);
    }

    #[test]
    fn lemma_operator_inequality_holds(
        a in prop::array::uniform3(-1.0f64..1.0),
        eps in 0.0f64..0.2,
        mu in -1.0f64..3.0,
        frac in 0.0f64..1.0,
    ) {
        // lab projector at fidelity between 1 − ε and 1 with the |0⟩ target
        let Some(dir) = unit(a) else { return Ok(()) };
        let cos = 1.0 - 2.0 * eps * frac;
        let perp = [dir.0[0], dir.0[1], 0.0];
        let pn = (perp[0] * perp[0] + perp[1] * perp[1]).sqrt();
        prop_assume!(pn > 1e-3);
        let sin = (1.0 - cos * cos).max(0.0).sqrt();
        let n = [sin * perp[0] / pn, sin * perp[1] / pn, cos];
        let lab = observable_from_bloch(&BlochVector::unit(n)).unwrap().projector(0);
        let targ = HermitianOperator::diagonal(&[1.0, 0.0]);
        let (scale, shift) = lemma_operator_bound(eps, mu, 1).unwrap();
        let gap = &(&targ.scale(scale) + &HermitianOperator::identity(2).scale(shift)) - &lab;
        prop_assert!(gap.min_eigenvalue() >= -1e-9, "{}", gap.min_eigenvalue());
    }

    #[test]
    fn seesaw_never_exceeds_the_lemma(eps in 0.0f64..0.05, y in 0usize..3) {
        let w = esi_witness();
        let mut per = [0.0; 3];
        per[y] = eps;
        let spec = ImprecisionSpec::per_setting(&per).unwrap();
        let t = [0.5, -0.5, -0.5];
        let lower = seesaw_strategy(&w, &t, 0.0, &spec, 2, 5).unwrap();
        let upper = lemma_bound_t(&w, &t, 0.0, &spec).unwrap();
        prop_assert!(lower <= upper + 1e-9, "{lower} > {upper}");
    }

    #[test]
    fn f_is_increasing(a in 0.0f64..0.2, b in 0.0f64..0.2) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(f_eps(lo).unwrap() <= f_eps(hi).unwrap() + 1e-15);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_observable(&mut rng, 2, 1).op().clone();
        let b = random_observable(&mut rng, 3, 2).op().clone();
        let ab = kron(&a, &b);
        let ta = partial_trace(&ab, (2, 3), Subsystem::B).unwrap();
        prop_assert!(ta.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        let tb = partial_trace(&ab, (2, 3), Subsystem::A).unwrap();
        prop_assert!(tb.max_abs_diff(&b.scale(a.trace())) < 1e-12);
    }

    #[test]
    fn quantum_assemblages_respect_the_quantum_value(v in 0.0f64..1.0, seed in any::<u64>()) {
        let w = esi_witness();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alice: Vec<_> = (0..4).map(|_| observable_from_bloch(&random_bloch(&mut rng)).unwrap()).collect();
        let rho = isotropic_state(v, 2).unwrap();
        let value = evaluate(&w, &rho, &alice).unwrap();
        prop_assert!(value <= 3f64.sqrt() + 1e-9);
        let sigma = assemblage_from(&rho, &alice).unwrap();
        prop_assert!((w.value_on(&sigma).unwrap() - value).abs() < 1e-12);
    }

    #[test]
    fn isotropic_value_scales_linearly(v in 0.0f64..1.0) {
        let w = esi_witness();
        let value = evaluate(&w, &isotropic_state(v, 2).unwrap(), &tetrahedron_observables()).unwrap();
        prop_assert!((value - v * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eta_solves_the_mixture_equation(q in 1.0f64..3.0, c in -1.0f64..1.0, beta in 0.5f64..2.0) {
        prop_assume!(c <= beta);
        let e = eta_crit_general(q, c, beta).unwrap();
        if e.detectable {
            prop_assert!((e.eta * q + (1.0 - e.eta) * c - beta).abs() < 1e-12);
        } else {
            prop_assert!(q <= beta);
        }
    }

    #[test]
    fn witness_json_round_trip(entries in prop::collection::vec(-2i32..=2, 6)) {
        let c = DMatrix::from_fn(2, 3, |x, y| entries[3 * x + y] as f64 / 2.0);
        prop_assume!(c.iter().any(|v| *v != 0.0));
        let targets = esi_witness().targets().to_vec();
        let w = Witness::from_correlators("random", c, targets).unwrap();
        let back = Witness::from_json(&w.to_json().unwrap()).unwrap();
        for a in 0..2 { for b in 0..2 { for x in 0..2 { for y in 0..3 {
            prop_assert_eq!(w.coeff(a, b, x, y), back.coeff(a, b, x, y));
        }}}}
        let (l1, l2) = (lhs_bound(&w).unwrap(), lhs_bound(&back).unwrap());
        prop_assert_eq!(l1, l2);
        prop_assert!(l1 <= quantum_value(&w).unwrap().value + 1e-9);
    }
}
