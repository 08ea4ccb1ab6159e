use imprecise_steering::plateau::*;
use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::witness::{esi_witness, family_witness, pauli_witness};

const SAMPLES: [f64; 4] = [1e-4, 1e-3, 3e-3, 1e-2];

#[test]
fn eps_star_closed_forms_and_bisection() {
    let e = epsilon_star_esi();
    assert!((e - (9.0 - 2.0 * 3f64.sqrt() - 30f64.sqrt()) / 18.0).abs() < 1e-15);
    assert!((e - epsilon_star_esi_alt()).abs() < 1e-15);
    let root = bisect_plateau(|x| f_eps(x).unwrap(), 1.0, 0.0, 0.01, 1e-14);
    assert!((root - e).abs() < 1e-10, "{root} vs {e}");
}

#[test]
fn class_two_value_equals_f_for_all_oracles() {
    // the class-2 strategy alone, without the max with class 1
    let w = esi_witness();
    let t = [0.5, -0.5, -0.5];
    for eps in SAMPLES {
        let spec = ImprecisionSpec::uniform(3, eps).unwrap();
        let f = f_eps(eps).unwrap();
        let lemma = lemma_bound_t(&w, &t, 0.0, &spec).unwrap();
        let see = seesaw_strategy(&w, &t, 0.0, &spec, 4, 3).unwrap();
        let grid = grid_oracle_class2(&spec, 400).unwrap();
        for (name, v) in [("lemma", lemma), ("seesaw", see), ("grid", grid)] {
            assert!((v - f).abs() < 1e-6, "{name} at {eps}: {v} vs {f}");
        }
    }
}

#[test]
fn witness_bound_is_one_inside_the_plateau() {
    let w = esi_witness();
    for eps in [1e-4, 1e-3, 3e-3, epsilon_star_esi() - 1e-9] {
        let spec = ImprecisionSpec::uniform(3, eps).unwrap();
        assert!((lemma_witness_bound(&w, &spec).unwrap() - 1.0).abs() < 1e-9);
    }
    let spec = ImprecisionSpec::uniform(3, 0.01).unwrap();
    assert!(lemma_witness_bound(&w, &spec).unwrap() > 1.09);
}

#[test]
fn mu_opt_reproduces_f() {
    let w = esi_witness();
    let t = [0.5, -0.5, -0.5];
    for eps in SAMPLES {
        let spec = ImprecisionSpec::uniform(3, eps).unwrap();
        let mu = [mu_opt(eps); 3];
        let v = lemma_strategy_value(&w, &t, 0.0, &mu, &spec);
        assert!((v - f_eps(eps).unwrap()).abs() < 1e-9, "{eps}: {v}");
    }
}

#[test]
fn f_endpoints() {
    assert!((f_eps(0.0).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    assert!((f_eps(f_eps_domain_max()).unwrap() - 1.5).abs() < 1e-12);
    assert!(f_eps(-1e-3).is_err());
    assert!(f_eps(0.3).is_err());
}

#[test]
fn pauli_bound_has_no_plateau() {
    assert!(pauli_bound(1e-8).unwrap() > 1.0);
    let frac = (pauli_bound(0.005).unwrap() - 1.0) / (3f64.sqrt() - 1.0);
    assert!((0.25..=0.27).contains(&frac), "{frac}");
    let w = pauli_witness();
    let spec = ImprecisionSpec::uniform(3, 0.005).unwrap();
    assert!((lemma_witness_bound(&w, &spec).unwrap() - pauli_bound(0.005).unwrap()).abs() < 1e-9);
}

#[test]
fn four_target_plateau() {
    let p = plateau_n4();
    assert!((p.eps_tilde_star - p.bisection).abs() < 1e-10);
    assert!((p.eps_tilde_star - 8.149e-4).abs() < 1e-6, "{}", p.eps_tilde_star);
    assert!((f_tilde(2.0 * p.eps_tilde_star).unwrap() - 1.0).abs() < 1e-12);
    // f̃(ε) = f(2ε)
    for e in [1e-4, 1e-3, 0.05] {
        assert!((f_tilde(e).unwrap() - f_eps(2.0 * e).unwrap()).abs() < 1e-12);
    }
    let w = family_witness(4).unwrap();
    let t = [0.5, -0.5, -0.5, 0.0];
    for e in [1e-4, 5e-4, 1e-3, 2e-3, 5e-3] {
        let spec = ImprecisionSpec::uniform(4, e).unwrap();
        let v = seesaw_strategy(&w, &t, 0.0, &spec, 4, 1).unwrap();
        assert!((v - f_tilde(e).unwrap()).abs() < 1e-7, "{e}: {v}");
    }
}

#[test]
fn anticommutator_plateau_is_one_third() {
    assert!((anticommutator_plateau() - 1.0 / 3.0).abs() < 1e-12);
    assert!((anticommutator_bound(0.0) - 3f64.sqrt() / 2.0).abs() < 1e-15);
}

#[test]
fn taylor_surface_reference_points() {
    let star = epsilon_star_esi();
    assert!((taylor_plateau(0.0, 0.0).unwrap() - (1.0 - (7.0f64 / 8.0).sqrt()) / 2.0).abs() < 1e-15);
    assert!((taylor_plateau(star, star).unwrap() - star).abs() < 1e-6);
    let a = taylor_plateau(0.004, 0.001).unwrap();
    let b = taylor_plateau(0.001, 0.004).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn closed_form_curve_reports_the_root() {
    let r = esi_closed_form_curve(50, 0.01).unwrap();
    assert!((r.epsilon_star - epsilon_star_esi()).abs() < 1e-12);
    assert_eq!(r.curve.len(), 50);
}
