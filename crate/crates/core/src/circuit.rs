//! Gate-level circuits over the native set `{H, X, Ry, Rz, CNOT}`, synthesis
//! of controlled single-qubit unitaries, and CNOT accounting.
//!
//! Rotation conventions:
//!
//! ```text
//! Ry(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]      Rz(θ) = diag(1, e^{iθ})
//! ```
//!
//! `Rz` is a phase gate, so an `Rz` on a control qubit implements a
//! controlled global phase exactly.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::{ComplexMatrix, PauliAxis};
use crate::{Error, Result, EXACT_TOL};

const ANGLE_EPS: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Ry(f64, usize),
    Rz(f64, usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Qubits touched, `(control, target)` order for CNOT.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Ry(_, q) | Gate::Rz(_, q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let v = match *self {
            Gate::H(_) => {
                let s = FRAC_1_SQRT_2;
                vec![c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]
            }
            Gate::X(_) => return PauliAxis::X.matrix(),
            Gate::Ry(t, _) => {
                let (s, co) = t.sin_cos();
                vec![c(co, 0.0), c(s, 0.0), c(-s, 0.0), c(co, 0.0)]
            }
            Gate::Rz(t, _) => vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, t)],
            Gate::Cnot { .. } => {
                let mut m = ComplexMatrix::zeros(4, 4);
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 3)] = c(1.0, 0.0);
                m[(3, 2)] = c(1.0, 0.0);
                return m;
            }
        };
        ComplexMatrix::from_vec(2, 2, v).expect("2x2 literal")
    }

    fn remapped(&self, map: &[usize]) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(map[q]),
            Gate::X(q) => Gate::X(map[q]),
            Gate::Ry(t, q) => Gate::Ry(t, map[q]),
            Gate::Rz(t, q) => Gate::Rz(t, map[q]),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: map[control],
                target: map[target],
            },
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        if let Gate::Ry(t, _) | Gate::Rz(t, _) = self {
            if !t.is_finite() {
                return Err(Error::Circuit(format!("non-finite angle in {self:?}")));
            }
        }
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= num_qubits) {
            return Err(Error::Circuit(format!(
                "{self:?} touches qubit {q} of a {num_qubits}-qubit circuit"
            )));
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::Circuit(format!("{self:?} has equal control and target")));
        }
        Ok(())
    }
}

/// An ordered gate list on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    pub label: String,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            label: label.into(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>, label: impl Into<String>) -> Result<Self> {
        let mut c = Self::new(num_qubits, label);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends all gates of `other`, which must live on the same register.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::Circuit(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.num_qubits, self.num_qubits
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Relabels qubit `q` as `map[q]` on a register of `num_qubits`.
    pub fn remap(&self, map: &[usize], num_qubits: usize) -> Result<Circuit> {
        if map.len() < self.num_qubits {
            return Err(Error::Circuit("qubit map shorter than register".into()));
        }
        let gates = self.gates.iter().map(|g| g.remapped(map)).collect();
        Circuit::from_gates(num_qubits, gates, self.label.clone())
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cnot()).count()
    }

    /// Product of the embedded gate matrices, last gate leftmost.
    pub fn unitary(&self) -> ComplexMatrix {
        let dim = 1 << self.num_qubits;
        self.gates.iter().fold(ComplexMatrix::identity(dim), |acc, g| {
            &embed(&g.matrix(), &g.qubits(), self.num_qubits) * &acc
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitDoc::from(self)).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CircuitDoc =
            serde_json::from_str(text).map_err(|e| Error::Circuit(format!("bad circuit JSON: {e}")))?;
        Circuit::try_from(doc)
    }
}

/// Full-register matrix of `u` acting on `targets` (first target is the most
/// significant bit of `u`'s index).
pub fn embed(u: &ComplexMatrix, targets: &[usize], num_qubits: usize) -> ComplexMatrix {
    let dim = 1usize << num_qubits;
    let k = targets.len();
    let sub_index = |i: usize| {
        targets.iter().enumerate().fold(0, |acc, (m, &q)| {
            acc | (((i >> (num_qubits - 1 - q)) & 1) << (k - 1 - m))
        })
    };
    let mask = targets.iter().fold(0usize, |acc, &q| acc | (1 << (num_qubits - 1 - q)));
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & !mask == c & !mask {
                out[(r, c)] = u[(sub_index(r), sub_index(c))];
            }
        }
    }
    out
}

/// See [`Circuit::unitary`].
pub fn unitary_of(c: &Circuit) -> ComplexMatrix {
    c.unitary()
}

/// See [`Circuit::cnot_count`].
pub fn cnot_count(c: &Circuit) -> usize {
    c.cnot_count()
}

/// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ u`.
pub fn controlled(u: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::identity(u.rows()).direct_sum(u)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    targets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    num_qubits: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    label: String,
    gates: Vec<GateDoc>,
}

impl From<&Circuit> for CircuitDoc {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates
            .iter()
            .map(|g| {
                let (kind, theta) = match *g {
                    Gate::H(_) => ("H", None),
                    Gate::X(_) => ("X", None),
                    Gate::Ry(t, _) => ("RY", Some(t)),
                    Gate::Rz(t, _) => ("RZ", Some(t)),
                    Gate::Cnot { .. } => ("CNOT", None),
                };
                GateDoc {
                    kind: kind.into(),
                    theta,
                    targets: g.qubits(),
                }
            })
            .collect();
        CircuitDoc {
            num_qubits: c.num_qubits,
            label: c.label.clone(),
            gates,
        }
    }
}

impl TryFrom<CircuitDoc> for Circuit {
    type Error = Error;

    fn try_from(doc: CircuitDoc) -> Result<Self> {
        let mut gates = Vec::with_capacity(doc.gates.len());
        for g in doc.gates {
            let bad = |msg: &str| Error::Circuit(format!("gate {}: {msg}", g.kind));
            let one = || match g.targets.as_slice() {
                [q] => Ok(*q),
                _ => Err(bad("expects one target")),
            };
            let theta = || g.theta.ok_or_else(|| bad("missing theta"));
            let gate = match g.kind.to_ascii_uppercase().as_str() {
                "H" => Gate::H(one()?),
                "X" => Gate::X(one()?),
                "RY" => Gate::Ry(theta()?, one()?),
                "RZ" => Gate::Rz(theta()?, one()?),
                "CNOT" | "CX" => match g.targets.as_slice() {
                    [c, t] => Gate::Cnot {
                        control: *c,
                        target: *t,
                    },
                    _ => return Err(bad("expects (control, target)")),
                },
                _ => return Err(bad("unknown kind")),
            };
            gates.push(gate);
        }
        Circuit::from_gates(doc.num_qubits, gates, doc.label)
    }
}

// ---------------------------------------------------------------------------
// Synthesis

type Vec3 = [f64; 3];

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalized(v: Vec3) -> Vec3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// `n·σ` for a unit vector `n`.
fn reflection(n: Vec3) -> ComplexMatrix {
    let c = Complex64::new;
    ComplexMatrix::from_vec(2, 2, vec![c(n[2], 0.0), c(n[0], -n[1]), c(n[0], n[1]), c(-n[2], 0.0)])
        .expect("2x2 literal")
}

/// A unitary `V` with `V X V† = n·σ`: it maps the `X` eigenbasis onto the
/// eigenbasis of `n·σ`.
fn basis_change_to(n: Vec3) -> ComplexMatrix {
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let plus = [Complex64::new(ch, 0.0), e * sh];
    let minus = [Complex64::new(sh, 0.0), -e * ch];
    let s = FRAC_1_SQRT_2;
    // V = |n+⟩⟨+| + |n−⟩⟨−|
    let mut v = ComplexMatrix::zeros(2, 2);
    for r in 0..2 {
        v[(r, 0)] = (plus[r] + minus[r]) * s;
        v[(r, 1)] = (plus[r] - minus[r]) * s;
    }
    v
}

fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Native gates (time order) realizing the 2×2 unitary `w` on `qubit` up to
/// a global phase, via a Z-Y-Z Euler decomposition.
pub fn single_qubit_gates(w: &ComplexMatrix, qubit: usize) -> Vec<Gate> {
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    let inv_root = det.sqrt().inv();
    let a = w[(0, 0)] * inv_root;
    let b = w[(1, 0)] * inv_root;
    let half = b.norm().atan2(a.norm());
    let (beta, delta) = if b.norm() < 1e-12 {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < 1e-12 {
        (2.0 * b.arg(), 0.0)
    } else {
        let sum = -2.0 * a.arg();
        let diff = 2.0 * b.arg();
        ((sum + diff) / 2.0, (sum - diff) / 2.0)
    };
    // RZ(x) is Rz(x) up to phase; the standard RY(2·half) is Ry(−half).
    let mut out = Vec::new();
    let delta = wrap_angle(delta);
    if delta.abs() > ANGLE_EPS {
        out.push(Gate::Rz(delta, qubit));
    }
    if half.abs() > ANGLE_EPS {
        out.push(Gate::Ry(-half, qubit));
    }
    let beta = wrap_angle(beta);
    if beta.abs() > ANGLE_EPS {
        out.push(Gate::Rz(beta, qubit));
    }
    out
}

// Fixed auxiliary reflection axes used when a budget asks for more CNOTs than
// the minimal circuit needs. Consecutive axes are far from collinear so the
// resulting CNOTs never cancel pairwise.
fn padding_axis(k: usize) -> Vec3 {
    let t = 1.1 + 0.7 * k as f64;
    let p = 2.399_963_229_728_653 * k as f64;
    [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
}

/// Writes `v` (any 2×2 unitary) as `e^{iα} (n1·σ)(n2·σ)`.
fn two_reflections(v: &ComplexMatrix) -> (f64, Vec3, Vec3) {
    let det = v[(0, 0)] * v[(1, 1)] - v[(0, 1)] * v[(1, 0)];
    let root = det.sqrt();
    let alpha = root.arg();
    let s00 = v[(0, 0)] / root;
    let s10 = v[(1, 0)] / root;
    // S = s0·I − i(s1 X + s2 Y + s3 Z)
    let s0 = s00.re;
    let svec = [-s10.im, s10.re, -s00.im];
    let sn = (svec[0] * svec[0] + svec[1] * svec[1] + svec[2] * svec[2]).sqrt();
    if sn < 1e-14 {
        let n1 = [1.0, 0.0, 0.0];
        let n2 = if s0 > 0.0 { n1 } else { [-1.0, 0.0, 0.0] };
        return (alpha, n1, n2);
    }
    let m = [svec[0] / sn, svec[1] / sn, svec[2] / sn];
    let helper = if m[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let n2 = normalized(cross(m, helper));
    let n2xm = cross(n2, m);
    let n1 = normalized([
        s0 * n2[0] - sn * n2xm[0],
        s0 * n2[1] - sn * n2xm[1],
        s0 * n2[2] - sn * n2xm[2],
    ]);
    (alpha, n1, n2)
}

fn proportional_to_identity(u: &ComplexMatrix) -> bool {
    u[(0, 1)].norm() <= EXACT_TOL && u[(1, 0)].norm() <= EXACT_TOL && (u[(0, 0)] - u[(1, 1)]).norm() <= EXACT_TOL
}

/// Smallest CNOT count [`compile_controlled_2x2`] uses for `u` when no
/// budget is requested: 0 for multiples of the identity, 1 for traceless
/// `u` (a multiple of a reflection), else 2.
pub fn minimal_cnots(u: &ComplexMatrix) -> usize {
    if proportional_to_identity(u) {
        0
    } else if u.trace().norm() <= EXACT_TOL {
        1
    } else {
        2
    }
}

/// Compiles control-`u` onto a 2-qubit circuit (control 0, target 1).
///
/// The controlled unitary is written as `e^{iα}` times a product of `r`
/// reflections `n_k·σ`. Each controlled reflection is one CNOT between
/// basis changes on the target, and the phase becomes `Rz(α)` on the control,
/// so the result matches control-`u` including its controlled phase (up to
/// an overall global phase of the circuit).
///
/// Without `budget_hint` the circuit uses [`minimal_cnots`]. With
/// `Some(r)` it uses exactly `r` CNOTs, which lets benchmark circuits
/// match a target two-qubit gate depth. `r = 1` is only possible when `u`
/// is a multiple of a reflection (traceless).
pub fn compile_controlled_2x2(u: &ComplexMatrix, budget_hint: Option<usize>) -> Result<Circuit> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Dimension(format!("{}x{} is not 2x2", u.rows(), u.cols())));
    }
    let err = u.unitarity_error();
    if err > EXACT_TOL {
        return Err(Error::NotUnitary(err));
    }
    let budget = budget_hint.unwrap_or_else(|| minimal_cnots(u));
    let mut circuit = Circuit::new(2, format!("c-u[{budget} cnot]"));

    if budget == 0 {
        if !proportional_to_identity(u) {
            return Err(Error::Circuit("a zero-CNOT budget needs u ∝ I".into()));
        }
        let alpha = wrap_angle(u[(0, 0)].arg());
        if alpha.abs() > ANGLE_EPS {
            circuit.push(Gate::Rz(alpha, 0))?;
        }
        return Ok(circuit);
    }

    // Reflection axes in matrix-product order: u = e^{iα} R_1 R_2 … R_r.
    let (alpha, axes) = if budget == 1 {
        if u.trace().norm() > EXACT_TOL {
            return Err(Error::Circuit("a one-CNOT budget needs a traceless u".into()));
        }
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        let phase = (-det).sqrt();
        let r = u.scale(phase.inv());
        let n = normalized([r[(1, 0)].re, r[(1, 0)].im, r[(0, 0)].re]);
        (phase.arg(), vec![n])
    } else {
        let pads: Vec<Vec3> = (0..budget - 2).map(padding_axis).collect();
        // v = u · (P_3 ⋯ P_r)^{-1} = u · P_r ⋯ P_3
        let v = pads.iter().rev().fold(u.clone(), |acc, &p| &acc * &reflection(p));
        let (alpha, n1, n2) = two_reflections(&v);
        let mut axes = vec![n1, n2];
        axes.extend(pads);
        (alpha, axes)
    };

    let alpha = wrap_angle(alpha);
    if alpha.abs() > ANGLE_EPS {
        circuit.push(Gate::Rz(alpha, 0))?;
    }
    // Rightmost reflection acts first. Between consecutive CNOTs the target
    // sees V_next† V_prev, merged into one Euler triple.
    let mut pending = ComplexMatrix::identity(2);
    for &n in axes.iter().rev() {
        let v = basis_change_to(n);
        let merged = &v.adjoint() * &pending;
        for g in single_qubit_gates(&merged, 1) {
            circuit.push(g)?;
        }
        circuit.push(Gate::Cnot { control: 0, target: 1 })?;
        pending = v;
    }
    for g in single_qubit_gates(&pending, 1) {
        circuit.push(g)?;
    }
    Ok(circuit)
}

/// Wraps a controlled payload into a DQC1 circuit: `H` on the clean qubit 0,
/// the payload, then the basis change that maps `meas_axis` onto a `Z`
/// readout of qubit 0.
///
/// The payload must use qubit 0 only as a CNOT control or through diagonal
/// `Rz` phases, so that it stays a controlled operation.
pub fn build_dqc1_circuit(payload: &Circuit, n_mixed: usize, meas_axis: PauliAxis) -> Result<Circuit> {
    if payload.num_qubits() != n_mixed + 1 {
        return Err(Error::Circuit(format!(
            "payload has {} qubits, expected {}",
            payload.num_qubits(),
            n_mixed + 1
        )));
    }
    check_controlled_payload(payload)?;
    let mut c = Circuit::new(n_mixed + 1, format!("dqc1[{}] {}", meas_axis, payload.label));
    c.push(Gate::H(0))?;
    c.append(payload)?;
    for g in readout_rotation(meas_axis, 0) {
        c.push(g)?;
    }
    Ok(c)
}

/// Rejects payloads that act on qubit 0 other than as a control.
pub fn check_controlled_payload(payload: &Circuit) -> Result<()> {
    for g in payload.gates() {
        let bad = matches!(
            *g,
            Gate::H(0) | Gate::X(0) | Gate::Ry(_, 0) | Gate::Cnot { target: 0, .. }
        );
        if bad {
            return Err(Error::Circuit(format!("payload gate {g:?} targets the clean qubit")));
        }
    }
    Ok(())
}

/// Gates mapping the `axis` eigenbasis onto the computational basis.
pub fn readout_rotation(axis: PauliAxis, qubit: usize) -> Vec<Gate> {
    match axis {
        PauliAxis::X => vec![Gate::H(qubit)],
        PauliAxis::Y => vec![Gate::Rz(-PI / 2.0, qubit), Gate::H(qubit)],
        PauliAxis::Z => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn euler(a: f64, b: f64, g: f64, phase: f64) -> ComplexMatrix {
        let (cb, sb) = ((b / 2.0).cos(), (b / 2.0).sin());
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                c(cb, 0.0),
                -Complex64::from_polar(sb, g),
                Complex64::from_polar(sb, a),
                Complex64::from_polar(cb, a + g),
            ],
        )
        .unwrap()
        .scale(Complex64::from_polar(1.0, phase))
    }

    fn check_compiled(u: &ComplexMatrix, hint: Option<usize>) -> Circuit {
        let circ = compile_controlled_2x2(u, hint).unwrap();
        let d = circ.unitary().phase_distance(&controlled(u));
        assert!(d <= 1e-9, "compiled control-u off by {d:e}\n{u:?}\n{circ:?}");
        circ
    }

    #[test]
    fn gate_conventions() {
        let ry = Gate::Ry(0.3, 0).matrix();
        assert!((ry[(0, 1)] - c(0.3f64.sin(), 0.0)).norm() < 1e-15);
        assert!((ry[(1, 0)] + c(0.3f64.sin(), 0.0)).norm() < 1e-15);
        let rz = Gate::Rz(0.3, 0).matrix();
        assert_eq!(rz[(0, 0)], c(1.0, 0.0));
        assert!((rz[(1, 1)] - Complex64::from_polar(1.0, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn empty_and_trivial_circuits() {
        let empty = Circuit::new(2, "empty");
        assert_eq!(empty.cnot_count(), 0);
        assert_eq!(empty.unitary(), ComplexMatrix::identity(4));
        let hh = Circuit::from_gates(1, vec![Gate::H(0), Gate::H(0)], "hh").unwrap();
        assert!(hh.unitary().max_abs_diff(&ComplexMatrix::identity(2)) <= 1e-12);
    }

    #[test]
    fn cnot_embedding_respects_msb_order() {
        let c01 = Circuit::from_gates(2, vec![Gate::Cnot { control: 0, target: 1 }], "").unwrap();
        assert_eq!(c01.unitary(), Gate::Cnot { control: 0, target: 1 }.matrix());
        let c10 = Circuit::from_gates(2, vec![Gate::Cnot { control: 1, target: 0 }], "").unwrap();
        // |01⟩ (index 1) → |11⟩ (index 3)
        assert_eq!(c10.unitary()[(3, 1)], c(1.0, 0.0));
    }

    #[test]
    fn invalid_gates_rejected() {
        let mut circ = Circuit::new(2, "");
        assert!(circ.push(Gate::H(2)).is_err());
        assert!(circ.push(Gate::Cnot { control: 1, target: 1 }).is_err());
        assert!(circ.push(Gate::Ry(f64::NAN, 0)).is_err());
    }

    #[test]
    fn identity_compiles_to_no_cnots() {
        let circ = check_compiled(&ComplexMatrix::identity(2), None);
        assert_eq!(circ.cnot_count(), 0);
        assert!(circ.is_empty());
        // A global phase on u becomes a relative phase under control.
        let phased = ComplexMatrix::identity(2).scale(Complex64::from_polar(1.0, 0.7));
        let circ = check_compiled(&phased, None);
        assert_eq!(circ.cnot_count(), 0);
        assert_eq!(circ.gates(), &[Gate::Rz(0.7, 0)]);
    }

    #[test]
    fn diagonal_compiles_to_two_cnots() {
        let a = Complex64::from_polar(1.0, 3.0 * PI / 5.0);
        let b = Complex64::from_polar(1.0, -4.0 * PI / 5.0);
        let circ = check_compiled(&ComplexMatrix::diag(&[a, b]), None);
        assert_eq!(circ.cnot_count(), 2);
        let u1 = ComplexMatrix::diag(&[Complex64::from_polar(1.0, -0.4), Complex64::from_polar(1.0, 0.4)]);
        assert_eq!(check_compiled(&u1, None).cnot_count(), 2);
    }

    #[test]
    fn budgets_are_honored() {
        let u = euler(0.4, 1.3, -2.2, 0.9);
        for r in 2..=7 {
            assert_eq!(check_compiled(&u, Some(r)).cnot_count(), r);
        }
        let x = Gate::X(0).matrix().scale(Complex64::from_polar(1.0, 0.3));
        assert_eq!(check_compiled(&x, Some(1)).cnot_count(), 1);
        assert!(compile_controlled_2x2(&u, Some(1)).is_err());
        assert!(compile_controlled_2x2(&u, Some(0)).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let m = ComplexMatrix::diag(&[c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(compile_controlled_2x2(&m, None), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn single_qubit_decomposition_matches_up_to_phase() {
        for (a, b, g) in [
            (0.0, 0.0, 0.0),
            (0.3, 0.0, 1.0),
            (0.0, PI, 0.0),
            (1.0, 2.0, 3.0),
            (-2.0, 0.5, 0.1),
        ] {
            let w = euler(a, b, g, 0.2);
            let circ = Circuit::from_gates(1, single_qubit_gates(&w, 0), "").unwrap();
            assert!(circ.unitary().phase_distance(&w) < 1e-12, "{a} {b} {g}");
        }
    }

    #[test]
    fn dqc1_wrapper() {
        let payload = compile_controlled_2x2(&Gate::Rz(PI, 0).matrix(), None).unwrap();
        let circ = build_dqc1_circuit(&payload, 1, PauliAxis::Y).unwrap();
        assert_eq!(circ.gates()[0], Gate::H(0));
        assert_eq!(circ.cnot_count(), 1);
        assert_eq!(*circ.gates().last().unwrap(), Gate::H(0));

        let bad = Circuit::from_gates(2, vec![Gate::Cnot { control: 1, target: 0 }], "").unwrap();
        assert!(build_dqc1_circuit(&bad, 1, PauliAxis::X).is_err());
        let bad = Circuit::from_gates(2, vec![Gate::Ry(0.1, 0)], "").unwrap();
        assert!(build_dqc1_circuit(&bad, 1, PauliAxis::X).is_err());
        assert!(build_dqc1_circuit(&payload, 2, PauliAxis::X).is_err());
    }

    #[test]
    fn json_round_trip() {
        let u = euler(0.4, 1.3, -2.2, 0.9);
        let circ = compile_controlled_2x2(&u, Some(5)).unwrap();
        let back = Circuit::from_json(&circ.to_json()).unwrap();
        assert_eq!(back, circ);
        let text = r#"{"num_qubits": 2, "gates": [{"kind": "CNOT", "targets": [0, 1]}, {"kind": "RZ", "theta": 0.5, "targets": [1]}]}"#;
        let parsed = Circuit::from_json(text).unwrap();
        assert_eq!(parsed.cnot_count(), 1);
        assert!(Circuit::from_json(r#"{"num_qubits": 1, "gates": [{"kind": "RZ", "targets": [0]}]}"#).is_err());
        assert!(Circuit::from_json(r#"{"num_qubits": 1, "gates": [], "extra": 1}"#).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn compilation_is_sound(
            a in -PI..PI, b in 0.0..PI, g in -PI..PI, phase in -PI..PI,
        ) {
            let u = euler(a, b, g, phase);
            let circ = compile_controlled_2x2(&u, None).unwrap();
            prop_assert!(circ.cnot_count() <= 5);
            prop_assert!(circ.unitary().phase_distance(&controlled(&u)) <= 1e-8);
        }

        #[test]
        fn diagonal_inputs_stay_within_two(p in -PI..PI, q in -PI..PI) {
            let u = ComplexMatrix::diag(&[Complex64::from_polar(1.0, p), Complex64::from_polar(1.0, q)]);
            let circ = compile_controlled_2x2(&u, None).unwrap();
            prop_assert!(circ.cnot_count() <= 2);
            prop_assert!(circ.unitary().phase_distance(&controlled(&u)) <= 1e-9);
        }

        #[test]
        fn cnot_count_is_additive(n1 in 0usize..6, n2 in 0usize..6) {
            let mk = |n: usize| {
                let mut c = Circuit::new(3, "");
                for i in 0..n {
                    c.push(Gate::Cnot { control: i % 3, target: (i + 1) % 3 }).unwrap();
                    c.push(Gate::H(i % 3)).unwrap();
                }
                c
            };
            let (c1, c2) = (mk(n1), mk(n2));
            let mut joined = c1.clone();
            joined.append(&c2).unwrap();
            prop_assert_eq!(joined.cnot_count(), c1.cnot_count() + c2.cnot_count());
        }
    }
}
