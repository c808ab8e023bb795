//! Dense complex matrices and the density-matrix state.
//!
//! Registers here never exceed a handful of qubits (at most 8 in any
//! experiment), so everything is stored densely in row-major order and gates
//! are applied with index arithmetic instead of building full embedded
//! operators.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, EXACT_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(Error::Dimension("ragged rows".into()));
            }
            data.extend_from_slice(r.as_ref());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * k).collect(),
        }
    }

    /// Largest entry-wise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Is this matrix diagonal (off-diagonal moduli at most `tol`)?
    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| (r, c)))
            .all(|(r, c)| r == c || self[(r, c)].norm() <= tol)
    }

    /// Square sub-block starting at `(offset, offset)`.
    pub fn block(&self, offset: usize, size: usize) -> Self {
        let mut out = Self::zeros(size, size);
        for r in 0..size {
            for c in 0..size {
                out[(r, c)] = self[(offset + r, offset + c)];
            }
        }
        out
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)];
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out[(self.rows + r, self.cols + c)] = other[(r, c)];
            }
        }
        out
    }

    /// Smallest `‖self − e^{iγ}·other‖_max` over global phases `γ`.
    ///
    /// The phase is taken from the overlap `tr(other† self)`, which is the
    /// optimum whenever the two matrices agree up to phase.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let overlap: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum();
        if overlap.norm() < 1e-300 {
            return self.max_abs_diff(other);
        }
        let phase = overlap / overlap.norm();
        self.max_abs_diff(&other.scale(phase))
    }

    /// Matrix power by repeated multiplication; `k = 0` gives the identity.
    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| &acc * self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| {
                    let z = self[(r, c)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  {}", row.join("  "))?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliAxis::X => ComplexMatrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO]),
            PauliAxis::Y => ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]),
            PauliAxis::Z => ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE]),
        }
        .expect("2x2 literal")
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        };
        f.write_str(s)
    }
}

/// Mixed state of `num_qubits` qubits as a `2^n × 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis_state(num_qubits, 0)
    }

    /// `|index⟩⟨index|` in the computational basis.
    pub fn basis_state(num_qubits: usize, index: usize) -> Self {
        let dim = 1 << num_qubits;
        assert!(index < dim, "basis index out of range");
        let mut matrix = ComplexMatrix::zeros(dim, dim);
        matrix[(index, index)] = ONE;
        Self { num_qubits, matrix }
    }

    /// `I/2^n`.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        Self {
            num_qubits,
            matrix: ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        }
    }

    /// Validates Hermiticity and unit trace of `matrix`.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() || !matrix.rows().is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "{}x{} is not a square power-of-two shape",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > EXACT_TOL {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > EXACT_TOL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        Ok(Self {
            num_qubits: matrix.rows().trailing_zeros() as usize,
            matrix,
        })
    }

    /// `a ⊗ b`, with `a` on the leading (lower-numbered) qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&t) {
                return Err(Error::RepeatedQubit(t));
            }
        }
        Ok(())
    }

    /// `ρ → U ρ U†` with `u` acting on `targets` (first target = most
    /// significant bit of `u`'s index) and identity elsewhere.
    pub fn apply_unitary(&self, u: &ComplexMatrix, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_mut(u, targets)?;
        Ok(out)
    }

    /// In-place variant of [`DensityMatrix::apply_unitary`].
    pub fn apply_unitary_mut(&mut self, u: &ComplexMatrix, targets: &[usize]) -> Result<()> {
        self.check_targets(targets)?;
        let k = targets.len();
        if !u.is_square() || u.rows() != 1 << k {
            return Err(Error::Dimension(format!(
                "{}x{} operator on {k} target qubit(s)",
                u.rows(),
                u.cols()
            )));
        }
        self.conjugate_by(u, targets);
        Ok(())
    }

    // Unchecked kernel: rows via U, then columns via U†.
    fn conjugate_by(&mut self, u: &ComplexMatrix, targets: &[usize]) {
        let n = self.num_qubits;
        let dim = self.dim();
        let sub = u.rows();
        let offsets: Vec<usize> = (0..sub)
            .map(|j| {
                targets.iter().enumerate().fold(0, |acc, (m, &q)| {
                    let bit = (j >> (targets.len() - 1 - m)) & 1;
                    acc | (bit << (n - 1 - q))
                })
            })
            .collect();
        let mask = offsets.iter().fold(0, |acc, &o| acc | o);
        let bases: Vec<usize> = (0..dim).filter(|i| i & mask == 0).collect();
        let m = &mut self.matrix.data;
        let mut buf = vec![ZERO; sub];

        for col in 0..dim {
            for &base in &bases {
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..sub)
                        .map(|j| u.data[i * sub + j] * m[(base + offsets[j]) * dim + col])
                        .sum();
                }
                for (i, &v) in buf.iter().enumerate() {
                    m[(base + offsets[i]) * dim + col] = v;
                }
            }
        }
        for row in 0..dim {
            let r = row * dim;
            for &base in &bases {
                for (i, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..sub)
                        .map(|j| m[r + base + offsets[j]] * u.data[i * sub + j].conj())
                        .sum();
                }
                for (i, &v) in buf.iter().enumerate() {
                    m[r + base + offsets[i]] = v;
                }
            }
        }
    }

    /// `ρ → α ρ + (1 − α) I/2^n`.
    pub fn depolarize_global(&mut self, alpha: f64) {
        if alpha == 1.0 {
            return;
        }
        let dim = self.dim();
        let mix = (1.0 - alpha) / dim as f64;
        for (idx, x) in self.matrix.data.iter_mut().enumerate() {
            *x *= alpha;
            if idx / dim == idx % dim {
                x.re += mix;
            }
        }
    }

    /// Depolarizes only `qubits`: `ρ → α ρ + (1 − α) tr_S(ρ) ⊗ I_S/2^|S|`,
    /// realized as a uniform Pauli twirl over the subsystem.
    pub fn depolarize_local(&mut self, alpha: f64, qubits: &[usize]) -> Result<()> {
        self.check_targets(qubits)?;
        if alpha == 1.0 {
            return Ok(());
        }
        let paulis = [
            ComplexMatrix::identity(2),
            PauliAxis::X.matrix(),
            PauliAxis::Y.matrix(),
            PauliAxis::Z.matrix(),
        ];
        let k = qubits.len();
        let terms = 1usize << (2 * k);
        let mut twirled = ComplexMatrix::zeros(self.dim(), self.dim());
        for code in 0..terms {
            let mut p = ComplexMatrix::identity(1);
            for m in 0..k {
                p = kron(&p, &paulis[(code >> (2 * (k - 1 - m))) & 3]);
            }
            let mut term = self.clone();
            term.conjugate_by(&p, qubits);
            for (acc, x) in twirled.data.iter_mut().zip(&term.matrix.data) {
                *acc += x;
            }
        }
        let w = (1.0 - alpha) / terms as f64;
        for (x, t) in self.matrix.data.iter_mut().zip(&twirled.data) {
            *x = *x * alpha + t * w;
        }
        Ok(())
    }

    /// Reduced state on the qubits not listed in `discard`, kept in their
    /// original relative order.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        self.check_targets(discard)?;
        if discard.is_empty() || discard.len() >= self.num_qubits {
            return Err(Error::PartialTrace(format!(
                "discarding {} of {} qubits",
                discard.len(),
                self.num_qubits
            )));
        }
        let n = self.num_qubits;
        let keep: Vec<usize> = (0..n).filter(|q| !discard.contains(q)).collect();
        let spread = |bits: usize, qubits: &[usize]| {
            qubits.iter().enumerate().fold(0usize, |acc, (m, &q)| {
                acc | (((bits >> (qubits.len() - 1 - m)) & 1) << (n - 1 - q))
            })
        };
        let kdim = 1 << keep.len();
        let ddim = 1 << discard.len();
        let keep_idx: Vec<usize> = (0..kdim).map(|a| spread(a, &keep)).collect();
        let disc_idx: Vec<usize> = (0..ddim).map(|e| spread(e, discard)).collect();
        let mut out = ComplexMatrix::zeros(kdim, kdim);
        for a in 0..kdim {
            for b in 0..kdim {
                out[(a, b)] = disc_idx
                    .iter()
                    .map(|&e| self.matrix[(keep_idx[a] | e, keep_idx[b] | e)])
                    .sum();
            }
        }
        Ok(Self {
            num_qubits: keep.len(),
            matrix: out,
        })
    }

    /// `tr(ρ σ_axis)` on one qubit.
    pub fn expectation(&self, axis: PauliAxis, qubit: usize) -> Result<f64> {
        self.check_targets(&[qubit])?;
        let bit = 1 << (self.num_qubits - 1 - qubit);
        let m = &self.matrix;
        let value: Complex64 = (0..self.dim())
            .map(|r| {
                let set = r & bit != 0;
                match axis {
                    PauliAxis::Z => m[(r, r)] * if set { -1.0 } else { 1.0 },
                    PauliAxis::X => m[(r, r ^ bit)],
                    // σy[c][r] is -i when r has the bit set, +i otherwise.
                    PauliAxis::Y => m[(r, r ^ bit)] * if set { -I } else { I },
                }
            })
            .sum();
        debug_assert!(value.im.abs() <= EXACT_TOL, "non-real expectation {value}");
        Ok(value.re)
    }

    /// Hermiticity and unit trace. Positivity needs an eigendecomposition and
    /// is left to the test suite.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        Ok(())
    }
}
