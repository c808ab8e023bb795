// Cross-checks the dense linear algebra against nalgebra.

use dqc1bench::qstate::{kron, ComplexMatrix, DensityMatrix};
use dqc1bench::Complex64;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

fn close(a: &ComplexMatrix, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.rows() == b.nrows()
        && a.cols() == b.ncols()
        && (0..a.rows()).all(|r| (0..a.cols()).all(|c| (a[(r, c)] - b[(r, c)]).norm() <= tol))
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), rows * cols).prop_map(move |v| {
        ComplexMatrix::from_vec(
            rows,
            cols,
            v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect(),
        )
        .unwrap()
    })
}

/// Unitary from the QR factor of a random complex matrix.
fn arb_unitary(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    arb_matrix(dim, dim).prop_map(move |m| {
        let q = to_na(&m).qr().q();
        ComplexMatrix::from_vec(dim, dim, q.transpose().iter().copied().collect()).unwrap()
    })
}

/// Random density matrix `A A† / tr(A A†)`.
fn arb_density(n: usize) -> impl Strategy<Value = DensityMatrix> {
    arb_matrix(1 << n, 1 << n).prop_map(|a| {
        let rho = &a * &a.adjoint();
        let t = rho.trace();
        DensityMatrix::from_matrix(rho.scale(t.inv())).unwrap()
    })
}

/// Full-register operator of `u` on `targets`, built entry by entry.
fn embed_by_definition(u: &DMatrix<Complex64>, targets: &[usize], n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let sub = |x: usize| targets.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
    let rest = |x: usize| {
        (0..n)
            .filter(|q| !targets.contains(q))
            .map(|q| bit(x, q))
            .collect::<Vec<_>>()
    };
    DMatrix::from_fn(dim, dim, |r, c| {
        if rest(r) == rest(c) {
            u[(sub(r), sub(c))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

proptest! {
    #[test]
    fn products_and_adjoints(a in arb_matrix(3, 4), b in arb_matrix(4, 2)) {
        prop_assert!(close(&(&a * &b), &(to_na(&a) * to_na(&b)), 1e-12));
        prop_assert!(close(&a.adjoint(), &to_na(&a).adjoint(), 0.0));
    }

    #[test]
    fn kronecker_product(a in arb_matrix(2, 3), b in arb_matrix(3, 2)) {
        prop_assert!(close(&kron(&a, &b), &to_na(&a).kronecker(&to_na(&b)), 1e-12));
    }

    #[test]
    fn trace(a in arb_matrix(5, 5)) {
        prop_assert!((a.trace() - to_na(&a).trace()).norm() < 1e-12);
    }

    #[test]
    fn unitarity_of_qr_factors(u in arb_unitary(4)) {
        prop_assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn two_qubit_gate_on_any_targets(rho in arb_density(3), u in arb_unitary(4), pick in 0usize..6) {
        let targets = [[0, 1], [1, 0], [0, 2], [2, 0], [1, 2], [2, 1]][pick];
        let full = embed_by_definition(&to_na(&u), &targets, 3);
        let expected = &full * to_na(rho.matrix()) * full.adjoint();
        let got = rho.apply_unitary(&u, &targets).unwrap();
        prop_assert!(close(got.matrix(), &expected, 1e-12));
    }

    #[test]
    fn partial_trace_of_trailing_qubits(rho in arb_density(3)) {
        // Tr_B ρ = Σ_e (I ⊗ ⟨e|) ρ (I ⊗ |e⟩) with B the last two qubits.
        let r = to_na(rho.matrix());
        let mut expected = DMatrix::<Complex64>::zeros(2, 2);
        for e in 0..4 {
            let mut ket = DMatrix::<Complex64>::zeros(4, 1);
            ket[(e, 0)] = Complex64::new(1.0, 0.0);
            let proj = DMatrix::<Complex64>::identity(2, 2).kronecker(&ket);
            expected += proj.adjoint() * &r * proj;
        }
        let got = rho.partial_trace(&[1, 2]).unwrap();
        prop_assert!(close(got.matrix(), &expected, 1e-12));
    }
}
