// Distinguish braid closures of equal crossing count by their estimated
// Jones values on a noisy device, as distances between trial means.

use dqc1bench::knots::{distinguishing_pairs, estimate_jones, jones_oracle, knot_distance};
use dqc1bench::noise::{default_epoch, NoiseModel};

/// (pair label, measured distance, its error, exact distance).
fn run(shots: u64, trials: usize) -> dqc1bench::Result<Vec<(String, f64, f64, f64)>> {
    let model = NoiseModel::default();
    let now = default_epoch();
    let mut out = Vec::new();
    for (i, (a, b)) in distinguishing_pairs().into_iter().enumerate() {
        let ea = estimate_jones(&a, &model, shots, trials, "q0-q1", 2 * i as u64, now)?;
        let eb = estimate_jones(&b, &model, shots, trials, "q0-q1", 2 * i as u64 + 1, now)?;
        let (d, err) = knot_distance(&ea, &eb, false, None)?;
        let exact = (jones_oracle(&a) - jones_oracle(&b)).norm();
        out.push((format!("{a} vs {b}"), d, err, exact));
    }
    Ok(out)
}

fn main() -> dqc1bench::Result<()> {
    println!("{:<18} {:>16} {:>8}", "words", "measured", "exact");
    for (label, d, err, exact) in run(1 << 12, 12)? {
        println!("{label:<18} {d:>9.3} ± {err:.3} {exact:>8.3}");
    }
    Ok(())
}
