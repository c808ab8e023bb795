// Compile controlled single-qubit gates into CNOTs plus rotations and check
// the result against the exact controlled matrix.

use dqc1bench::circuit::{compile_controlled_2x2, controlled, minimal_cnots, unitary_of, Gate};
use dqc1bench::knots::FibConstants;
use dqc1bench::qstate::ComplexMatrix;
use dqc1bench::Complex64;

fn targets() -> Vec<(&'static str, ComplexMatrix)> {
    let fib = FibConstants::new();
    vec![
        ("identity", ComplexMatrix::identity(2)),
        ("X", Gate::X(0).matrix()),
        ("Rz(0.4)", Gate::Rz(0.4, 0).matrix()),
        (
            "Ry(1.1)·Rz(0.3)",
            &Gate::Ry(1.1, 0).matrix() * &Gate::Rz(0.3, 0).matrix(),
        ),
        ("diag(1, a)", ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), fib.a])),
    ]
}

/// Returns (name, CNOTs, distance up to global phase) per target.
fn run() -> dqc1bench::Result<Vec<(&'static str, usize, f64)>> {
    let mut out = Vec::new();
    for (name, u) in targets() {
        let c = compile_controlled_2x2(&u, None)?;
        assert_eq!(c.cnot_count(), minimal_cnots(&u));
        out.push((name, c.cnot_count(), unitary_of(&c).phase_distance(&controlled(&u))));
    }
    Ok(out)
}

fn main() -> dqc1bench::Result<()> {
    for (name, cnots, err) in run()? {
        println!("c-{name:<16} {cnots} CNOTs, error {err:.1e}");
    }
    Ok(())
}
