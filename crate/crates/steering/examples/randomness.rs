//! Certified randomness against the observed value of the elegant inequality.
//!
//! Uses a coarse multiplier grid so that the ε > 0 curve finishes in about a minute.

use imprecise_steering::quantum::ImprecisionSpec;
use imprecise_steering::relax::{guessing_probability_exact, randomness_curve, RandomnessSettings};
use imprecise_steering::witness::esi_witness;

fn main() -> imprecise_steering::Result<()> {
    let w = esi_witness();
    let (pg, r) = guessing_probability_exact(&w, 1.6)?;
    println!("primal at W=1.6: Pg={pg:.6} R={r:.6}");

    let values: Vec<f64> = (0..=6).map(|i| 1.0 + (3f64.sqrt() - 1.0) * i as f64 / 6.0).collect();
    let settings = RandomnessSettings { grid: 21, ..Default::default() };
    let ideal = randomness_curve(&w, &values, &ImprecisionSpec::exact(3), &settings)?;
    let noisy = randomness_curve(&w, &values, &ImprecisionSpec::uniform(3, 3e-3)?, &settings)?;
    println!("{:>8} {:>10} {:>10}", "W", "R(0)", "R(3e-3)");
    for (a, b) in ideal.iter().zip(&noisy) {
        println!("{:>8.4} {:>10.6} {:>10.6}", a.witness_value, a.r, b.r);
    }
    Ok(())
}
