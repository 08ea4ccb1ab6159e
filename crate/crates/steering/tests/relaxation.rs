use imprecise_steering::plateau::{epsilon_star_esi, f_eps, taylor_plateau};
use imprecise_steering::quantum::{max_entangled, observable_from_bloch, BlochVector, ImprecisionSpec, Observable};
use imprecise_steering::relax::*;
use imprecise_steering::witness::esi_witness;

fn triangle() -> (CorrelationTable, Vec<Observable>) {
    let h = 3f64.sqrt() / 2.0;
    let obs: Vec<Observable> = [[1.0, 0.0, 0.0], [-0.5, 0.0, h], [-0.5, 0.0, -h]]
        .iter()
        .map(|d| observable_from_bloch(&BlochVector::unit(*d)).unwrap())
        .collect();
    (CorrelationTable::from_state(&max_entangled(2).unwrap(), &obs, &obs).unwrap(), obs)
}

#[test]
fn level_one_shape() {
    let b = witness_basis(&esi_witness(), 1, 7).unwrap();
    assert_eq!(b.side(), 14);
    assert_eq!(b.num_variables(), 19);
}

#[test]
fn randomness_monomials_are_large_enough() {
    assert!(randomness_monomials(2).side() >= 296);
}

#[test]
fn ideal_relaxation_recovers_the_lhs_bound() {
    let w = esi_witness();
    let basis = witness_basis(&w, 1, 7).unwrap();
    let sol = relaxation_bound(&w, &ImprecisionSpec::exact(3), &basis).unwrap();
    assert!((sol.bound - 1.0).abs() < 1e-6, "{}", sol.bound);
    let class2 = sol.per_strategy.iter().filter(|(_, b)| (b - 3f64.sqrt() / 2.0).abs() < 1e-6).count();
    assert_eq!(class2, 8);
}

#[test]
fn per_strategy_bounds_match_f_and_do_not_depend_on_the_seed() {
    let w = esi_witness();
    let spec = ImprecisionSpec::uniform(3, 2e-3).unwrap();
    let f = f_eps(2e-3).unwrap();
    let mut tops = Vec::new();
    for seed in [1, 7, 42] {
        let basis = witness_basis(&w, 1, seed).unwrap();
        let sol = relaxation_bound(&w, &spec, &basis).unwrap();
        let worst = sol.per_strategy.iter().map(|(_, b)| *b).filter(|b| *b < 0.99).fold(0.0, f64::max);
        assert!((worst - f).abs() < 1e-6, "seed {seed}: {worst} vs {f}");
        tops.push(worst);
    }
    assert!(tops.windows(2).all(|p| (p[0] - p[1]).abs() < 1e-7));
}

#[test]
fn mixed_exact_and_imprecise_settings_solve() {
    let w = esi_witness();
    let basis = witness_basis(&w, 1, 7).unwrap();
    let spec = ImprecisionSpec::per_setting(&[0.0, 0.0, 0.01]).unwrap();
    let sol = relaxation_bound(&w, &spec, &basis).unwrap();
    assert!(sol.bound >= 1.0 - 1e-7);
    let worst = sol.per_strategy.iter().map(|(_, b)| *b).filter(|b| *b < 0.99).fold(0.0, f64::max);
    assert!((worst - 0.9437756).abs() < 1e-5, "{worst}");
}

#[test]
fn eps_z_plateau_matches_the_expansion() {
    let w = esi_witness();
    let basis = witness_basis(&w, 1, 7).unwrap();
    let origin = plateau_sdp(&w, 0.0, 0.0, &basis).unwrap();
    assert!((origin - taylor_plateau(0.0, 0.0).unwrap()).abs() < 1e-5, "{origin}");
    let star = epsilon_star_esi();
    let diag = plateau_sdp(&w, star, star, &basis).unwrap();
    assert!((diag - star).abs() < 1e-5, "{diag}");
    assert!(plateau_sdp(&w, 0.01, 0.01, &basis).unwrap() < 1e-6);
}

#[test]
fn triangle_visibility_is_two_thirds() {
    let (p, obs) = triangle();
    let v = visibility_assemblage(&p, &obs).unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-6, "{v}");
    let basis = build_basis(2, &MonomialList::witness(3, 1), &obs, 7).unwrap();
    let v1 = visibility_sdp(&p, &ImprecisionSpec::exact(3), &basis).unwrap();
    assert!((v1 - 2.0 / 3.0).abs() < 1e-6, "{v1}");
}

#[test]
fn exact_guessing_probability_reference() {
    let (pg, r) = guessing_probability_exact(&esi_witness(), 1.4).unwrap();
    assert!((pg - 0.787141).abs() < 1e-5, "{pg}");
    assert!((r + pg.log2()).abs() < 1e-12);
}

#[test]
fn randomness_endpoints_and_monotonicity_at_zero_imprecision() {
    let w = esi_witness();
    let values: Vec<f64> = (0..=8).map(|i| 1.0 + (3f64.sqrt() - 1.0) * i as f64 / 8.0).collect();
    let settings = RandomnessSettings { grid: 41, ..Default::default() };
    let curve = randomness_curve(&w, &values, &ImprecisionSpec::exact(3), &settings).unwrap();
    assert_eq!(curve[0].r, 0.0);
    assert!(curve.windows(2).all(|p| p[1].r >= p[0].r - 1e-9));
    assert!(curve.last().unwrap().r > 0.9);
    assert_eq!(max_deficit(&curve, &curve), 0.0);
}
