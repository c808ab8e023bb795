// Estimate the normalized trace of a random-looking payload with one clean
// qubit and compare against the exact value.

use dqc1bench::bench::u1;
use dqc1bench::circuit::{compile_controlled_2x2, Circuit, Gate};
use dqc1bench::dqc1::{estimate_normalized_trace, ideal_normalized_trace, PrepStrategy};
use dqc1bench::noise::{default_epoch, NoiseModel};
use dqc1bench::qstate::{kron, ComplexMatrix};
use dqc1bench::Complex64;

fn ry(theta: f64) -> ComplexMatrix {
    Gate::Ry(theta, 0).matrix()
}

/// Controlled `a ⊗ b` on mixed qubits 1 and 2.
fn payload(a: &ComplexMatrix, b: &ComplexMatrix) -> dqc1bench::Result<Circuit> {
    let mut c = compile_controlled_2x2(a, None)?.remap(&[0, 1], 3)?;
    c.append(&compile_controlled_2x2(b, None)?.remap(&[0, 2], 3)?)?;
    Ok(c)
}

/// Returns (exact, noiseless estimate, noisy estimate).
fn run() -> dqc1bench::Result<(Complex64, Complex64, Complex64)> {
    let (a, b) = (ry(0.7), u1(1.3));
    let c = payload(&a, &b)?;
    let exact = ideal_normalized_trace(&kron(&a, &b))?;
    let now = default_epoch();
    let prep = PrepStrategy::DirectMixed;
    let clean = estimate_normalized_trace(&c, 2, prep, &NoiseModel::noiseless(), 1 << 15, 7, now)?;
    let noisy = estimate_normalized_trace(&c, 2, prep, &NoiseModel::default(), 1 << 15, 7, now)?;
    println!("payload uses {} CNOTs", c.cnot_count());
    Ok((exact, clean.value(), noisy.value()))
}

fn main() -> dqc1bench::Result<()> {
    let (exact, clean, noisy) = run()?;
    println!("exact     Tr U / 4  = {exact:.4}");
    println!("noiseless estimate = {clean:.4}");
    println!("default noise      = {noisy:.4}");
    Ok(())
}
