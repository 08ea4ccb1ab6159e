use std::f64::consts::FRAC_PI_4;

use imprecise_steering::plateau::{epsilon_star_esi, lemma_witness_bound};
use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::robustness::*;
use imprecise_steering::witness::dodecahedron_witness;

#[test]
fn general_formula() {
    let e = eta_crit_general(2.0, 0.0, 1.0).unwrap();
    assert!(e.detectable && (e.eta - 0.5).abs() < 1e-15);
    let e = eta_crit_general(0.9, 0.0, 1.0).unwrap();
    assert!(!e.detectable && e.eta == 1.0);
    assert!(eta_crit_general(2.0, 1.5, 1.0).is_err());
    assert!(eta_crit_general(f64::NAN, 0.0, 1.0).is_err());
}

#[test]
fn esi_limit_and_maximally_entangled_value() {
    assert!((eta_crit_esi(1e-4).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    assert!((esi_quantum_value(FRAC_PI_4) - 3f64.sqrt()).abs() < 1e-12);
    assert!((eta_crit_esi(FRAC_PI_4).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn esi_eta_constant_across_the_plateau() {
    let base = eta_crit_esi_at(0.0).unwrap();
    let star = epsilon_star_esi();
    for k in 0..=10 {
        let v = eta_crit_esi_at(star * k as f64 / 10.0).unwrap();
        assert!((v - base).abs() < 1e-9, "{k}: {v}");
    }
    assert!(eta_crit_esi_at(0.01).unwrap() > base + 1e-3);
}

#[test]
fn efficiency_curve_decreases_toward_small_theta() {
    let thetas: Vec<f64> = (1..=8).map(|k| FRAC_PI_4 * k as f64 / 8.0).collect();
    let curve = esi_efficiency_curve(&thetas, 0.0).unwrap();
    let etas: Vec<f64> = curve.samples.iter().map(|s| s.eta_crit).collect();
    assert!(etas.windows(2).all(|w| w[0] <= w[1] + 1e-12), "{etas:?}");
}

#[test]
fn pauli_search_at_eps_star() {
    let r = pauli_eta_search(epsilon_star_esi(), 1).unwrap();
    assert!((r.eta - 0.606).abs() < 0.01, "{}", r.eta);
    let r0 = pauli_eta_search(0.0, 1).unwrap();
    assert!((r0.eta - 1.0 / 3.0).abs() < 1e-3, "{}", r0.eta);
}

#[test]
fn four_target_limit_and_detection_program() {
    let lim = theta_limit(eta_crit_n4).unwrap();
    assert!((lim - 0.25).abs() < 1e-3, "{lim}");
    let low = detection_sdp_n4(0.2).unwrap();
    assert!(!low.detectable);
    let high = detection_sdp_n4(0.3).unwrap();
    assert!(high.detectable);
    let full = detection_sdp_n4(1.0).unwrap();
    assert!((full.q - 2.0).abs() < 1e-6, "{}", full.q);
}

#[test]
fn dodecahedron_values() {
    let w = dodecahedron_witness();
    let ideal = dodecahedron_eta_ideal(1).unwrap();
    assert!((ideal.eta - 0.227).abs() < 0.005, "{}", ideal.eta);
    let spec = ImprecisionSpec::uniform(w.n_y(), epsilon_star_esi()).unwrap();
    let beta = lemma_witness_bound(&w, &spec).unwrap();
    assert!(beta <= 0.6081 + 1e-3, "{beta}");
    let r = dodecahedron_eta(beta, 1).unwrap();
    assert!((r.eta - 0.53).abs() < 0.01, "{}", r.eta);
}
