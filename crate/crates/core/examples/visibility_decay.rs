// Visibility decay with circuit depth: θ sweeps for l = 0..=8 repetitions
// of the controlled phase payload, then an exponential fit in CNOT count.

use dqc1bench::bench::{fit_exponential, visibility, visibility_decay, visibility_series, FitResult, SweepSpec};
use dqc1bench::dqc1::PrepStrategy;
use dqc1bench::noise::{default_epoch, NoiseModel};

fn run(n_mixed: usize) -> dqc1bench::Result<FitResult> {
    let spec = SweepSpec {
        n_mixed,
        l: 0,
        grid: 13,
        shots: 1 << 13,
        seed: 11,
        prep: PrepStrategy::DirectMixed,
    };
    let ls: Vec<usize> = (0..=8).collect();
    let curves = visibility_decay(&spec, &ls, &NoiseModel::depolarizing(0.97), default_epoch())?;
    for c in &curves {
        println!(
            "N={} l={} CNOTs={:>2} visibility={:.4}",
            c.n_mixed,
            c.l,
            c.cnots,
            visibility(c)
        );
    }
    fit_exponential(&visibility_series(&curves))
}

fn main() -> dqc1bench::Result<()> {
    let fit = run(1)?;
    println!(
        "fit: a = {:.3}, τ = {:.2} CNOTs, R² = {:.4}",
        fit.a, fit.tau, fit.r_squared
    );
    println!(
        "pure depolarization 0.97 per CNOT implies τ = {:.2}",
        -1.0 / 0.97f64.ln()
    );
    Ok(())
}
