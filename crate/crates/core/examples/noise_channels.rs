// How each noise ingredient shows up in a single controlled-phase
// experiment: global vs local depolarization, the coherent CNOT error
// kinds, and readout bias.

use dqc1bench::bench::sweep_payload;
use dqc1bench::dqc1::{estimate_normalized_trace, exact_normalized_trace, PrepStrategy};
use dqc1bench::noise::{default_epoch, CoherentKind, DepolScope, NoiseModel};
use dqc1bench::Complex64;

fn run() -> dqc1bench::Result<Vec<(String, Complex64)>> {
    let theta = std::f64::consts::FRAC_PI_2;
    let payload = sweep_payload(1, 4, theta)?;
    let now = default_epoch();
    let mut models = vec![
        ("noiseless".to_string(), NoiseModel::noiseless()),
        ("depolarizing 0.97".to_string(), NoiseModel::depolarizing(0.97)),
    ];
    let mut local = NoiseModel::depolarizing(0.97);
    local.depol_scope = DepolScope::Local;
    models.push(("local depolarizing 0.97".into(), local));
    for kind in [CoherentKind::ControlZ, CoherentKind::Zz, CoherentKind::TargetX] {
        let mut m = NoiseModel::noiseless().with_coherent(0.08);
        m.coherent_kind = kind;
        models.push((format!("coherent {kind:?} 0.08"), m));
    }
    let mut rows = Vec::new();
    for (name, m) in models {
        let v = exact_normalized_trace(&payload, 1, PrepStrategy::DirectMixed, &m, now)?;
        rows.push((name, v));
    }
    let mut biased = NoiseModel::noiseless();
    biased.readout_flip = 0.05;
    let est = estimate_normalized_trace(&payload, 1, PrepStrategy::DirectMixed, &biased, 0, 0, now)?;
    rows.push(("readout flip 0.05".into(), est.value()));
    Ok(rows)
}

fn main() -> dqc1bench::Result<()> {
    println!("l = 4 repetitions of the θ = π/2 phase payload, one mixed qubit");
    for (name, v) in run()? {
        println!("{name:<28} ⟨σx⟩ = {:+.4}  ⟨σy⟩ = {:+.4}", v.re, v.im);
    }
    Ok(())
}
