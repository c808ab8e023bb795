// The coherent CNOT error drifts as a random walk in time. Running the same
// knot experiment on two simulated dates shows how far the estimates move.

use chrono::Duration;
use dqc1bench::knots::{estimate_jones, BraidWord, Generator};
use dqc1bench::noise::{default_epoch, NoiseModel, ResolvedNoise};
use dqc1bench::seed;
use dqc1bench::Complex64;

/// Per date offset in days: (drifted ε seen by the upper block, σ12³
/// estimate).
fn run(days: &[i64]) -> dqc1bench::Result<Vec<(i64, f64, Complex64)>> {
    let mut model = NoiseModel::default();
    model.drift.sigma_per_day = 0.01;
    model.drift.seed = 2024;
    let word = BraidWord::power(Generator::S12, 3);
    let mut out = Vec::new();
    for &d in days {
        let now = default_epoch() + Duration::days(d);
        // The upper block runs with drift seed derive(seed, [0]).
        let mut upper = model.clone();
        upper.drift.seed = seed::derive(model.drift.seed, &[0]);
        let eps = ResolvedNoise::new(&upper, now)?.pair(0, 1).eps;
        let e = estimate_jones(&word, &model, 1 << 12, 8, "q0-q1", 5, now)?;
        out.push((d, eps, e.mean));
    }
    Ok(out)
}

fn main() -> dqc1bench::Result<()> {
    println!("σ12^3, same seed, different dates");
    for (d, eps, v) in run(&[0, 7, 30, 90])? {
        println!("day {d:>3}: ε(upper) = {eps:+.4}  V = {:+.4} {:+.4}i", v.re, v.im);
    }
    Ok(())
}
