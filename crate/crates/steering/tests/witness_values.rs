use imprecise_steering::quantum::{anticommuting_set, isotropic_state};
use imprecise_steering::witness::*;

#[test]
fn esi_has_three_classes_and_family4_seven() {
    let esi = enumerate_strategies(&esi_witness()).unwrap();
    assert_eq!(esi.len(), 3);
    let patterns: Vec<Vec<f64>> = esi.iter().map(|c| c.pattern()).collect();
    assert_eq!(patterns, vec![vec![1.0], vec![0.5, 0.5, 0.5], vec![]]);
    let counts: Vec<u64> = esi.iter().map(|c| c.count).collect();
    assert_eq!(counts, vec![6, 8, 2]);

    let fam = enumerate_strategies(&family_witness(4).unwrap()).unwrap();
    assert_eq!(fam.len(), 7);
    let mut got: Vec<Vec<f64>> = fam.iter().map(|c| c.pattern()).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut want = vec![
        vec![1.0],
        vec![0.75, 0.25, 0.25, 0.25],
        vec![0.5, 0.5, 0.5],
        vec![0.5, 0.5],
        vec![0.25, 0.25, 0.25, 0.25],
        vec![0.5],
        vec![],
    ];
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(got, want);
}

#[test]
fn family_bounds_and_quantum_values() {
    for n in 3..=6 {
        let w = family_witness(n).unwrap();
        assert_eq!(w.dim(), 1 << (n / 2));
        let beta = lhs_bound(&w).unwrap();
        assert!((beta - 1.0).abs() < 1e-9, "n={n}: {beta}");
        let q = quantum_value(&w).unwrap();
        assert!((q.value - (n as f64).sqrt()).abs() < 1e-9, "n={n}: {}", q.value);
        assert!(has_plateau(&w).unwrap());
    }
    assert!(!has_plateau(&pauli_witness()).unwrap());
    assert!(has_plateau(&esi_witness()).unwrap());
}

#[test]
fn dodecahedron_lhs_bound() {
    let beta = lhs_bound(&dodecahedron_witness()).unwrap();
    assert!((beta - (3.0 + 5f64.sqrt()) / 10.0).abs() < 1e-12, "{beta}");
}

#[test]
fn esi_quantum_value_and_isotropic_scaling() {
    let w = esi_witness();
    let alice = tetrahedron_observables();
    let v = 1.0 / 3f64.sqrt();
    let rho = isotropic_state(v, 2).unwrap();
    let val = evaluate(&w, &rho, &alice).unwrap();
    assert!((val - 1.0).abs() < 1e-12, "{val}");
    let _ = anticommuting_set(5).unwrap();
}

#[test]
fn class_counts_cover_every_strategy() {
    for n in 3..=6 {
        let w = family_witness(n).unwrap();
        let total: u64 = enumerate_strategies(&w).unwrap().iter().map(|c| c.count).sum();
        assert_eq!(total, 1u64 << w.n_x(), "n={n}");
    }
}
