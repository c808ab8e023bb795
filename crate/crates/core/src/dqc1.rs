//! One-clean-qubit trace estimation.
//!
//! The clean qubit 0 starts in `|+⟩`, the `n_mixed` remaining qubits in the
//! maximally mixed state. After a controlled payload `c-U`,
//! `⟨σx⟩ + i⟨σy⟩ = Tr U / 2^n` on qubit 0.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{check_controlled_payload, readout_rotation, Circuit, Gate};
use crate::noise::{sample_shots, NoiseModel, ResolvedNoise, ShotEstimate, Timestamp};
use crate::qstate::{ComplexMatrix, DensityMatrix, PauliAxis};
use crate::seed;
use crate::{Error, Result};

/// Largest register the dense simulator will allocate.
pub const MAX_SIM_QUBITS: usize = 11;

/// Above this many mixed qubits, flip averaging samples patterns at random.
const FLIP_EXHAUSTIVE_MAX: usize = 3;
const FLIP_SAMPLES: usize = 8;
const FLIP_TAG: u64 = 0xF1;

/// How the maximally mixed register is realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrepStrategy {
    /// Start directly from `I/2^n`.
    #[default]
    DirectMixed,
    /// Entangle each mixed qubit with an ancilla in a Bell pair and discard
    /// the ancillas.
    BellTrace,
    /// Average over computational basis inputs, prepared with `X` gates.
    FlipAverage,
}

impl PrepStrategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::DirectMixed => "direct-mixed",
            Self::BellTrace => "bell-trace",
            Self::FlipAverage => "flip-average",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub re: ShotEstimate,
    pub im: ShotEstimate,
    /// `⟨σz⟩` of the clean qubit, ideally 0; a sanity check.
    pub z_diag: ShotEstimate,
    pub n_mixed: usize,
    pub cnots: usize,
    pub prep: PrepStrategy,
    pub seed: u64,
    pub timestamp: Timestamp,
}

impl TraceEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.mean, self.im.mean)
    }

    /// Divides out a known polarization `alpha` of the clean qubit.
    pub fn rescaled(&self, alpha: f64) -> Self {
        let fix = |e: ShotEstimate| ShotEstimate {
            mean: e.mean / alpha,
            stderr: e.stderr / alpha,
            shots: e.shots,
        };
        Self {
            re: fix(self.re),
            im: fix(self.im),
            z_diag: fix(self.z_diag),
            ..self.clone()
        }
    }
}

/// `Tr U / dim` for a square matrix whose size is a power of two.
pub fn ideal_normalized_trace(u: &ComplexMatrix) -> Result<Complex64> {
    if !u.is_square() || !u.rows().is_power_of_two() {
        return Err(Error::Dimension(format!(
            "expected a square 2^n matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    Ok(u.trace() / u.rows() as f64)
}

/// Estimates `Tr U / 2^n_mixed` for the controlled payload `c-U`.
///
/// `shots` counts repetitions per readout axis; `0` gives the exact
/// expectation values (readout bias still applies).
pub fn estimate_normalized_trace(
    payload: &Circuit,
    n_mixed: usize,
    prep: PrepStrategy,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    now: Timestamp,
) -> Result<TraceEstimate> {
    let patterns = simulate(payload, n_mixed, prep, model, seed, now)?;
    let per_pattern = if shots == 0 {
        0
    } else {
        (shots / patterns.len() as u64).max(1)
    };
    let total = per_pattern * patterns.len() as u64;
    let mut out = [ShotEstimate::exact(0.0); 3];
    for (a, slot) in out.iter_mut().enumerate() {
        let mean = patterns
            .iter()
            .enumerate()
            .map(|(p, e)| {
                sample_shots(
                    e[a],
                    per_pattern,
                    model.readout_flip,
                    seed::derive(seed, &[p as u64, a as u64]),
                )
                .mean
            })
            .sum::<f64>()
            / patterns.len() as f64;
        *slot = ShotEstimate::new(mean, total);
    }
    Ok(TraceEstimate {
        re: out[0],
        im: out[1],
        z_diag: out[2],
        n_mixed,
        cnots: payload.cnot_count(),
        prep,
        seed,
        timestamp: now,
    })
}

/// Exact noisy expectation `⟨σx⟩ + i⟨σy⟩` without readout error or shot
/// noise.
pub fn exact_normalized_trace(
    payload: &Circuit,
    n_mixed: usize,
    prep: PrepStrategy,
    model: &NoiseModel,
    now: Timestamp,
) -> Result<Complex64> {
    let patterns = simulate(payload, n_mixed, prep, model, 0, now)?;
    let n = patterns.len() as f64;
    let re = patterns.iter().map(|e| e[0]).sum::<f64>() / n;
    let im = patterns.iter().map(|e| e[1]).sum::<f64>() / n;
    Ok(Complex64::new(re, im))
}

/// Per input pattern, the exact `[⟨σx⟩, ⟨σy⟩, ⟨σz⟩]` of the clean qubit.
fn simulate(
    payload: &Circuit,
    n_mixed: usize,
    prep: PrepStrategy,
    model: &NoiseModel,
    seed: u64,
    now: Timestamp,
) -> Result<Vec<[f64; 3]>> {
    if n_mixed == 0 {
        return Err(Error::Parameter("at least one mixed qubit is required".into()));
    }
    if payload.num_qubits() != n_mixed + 1 {
        return Err(Error::Circuit(format!(
            "payload has {} qubits, expected {}",
            payload.num_qubits(),
            n_mixed + 1
        )));
    }
    check_controlled_payload(payload)?;
    model.validate()?;
    let width = match prep {
        PrepStrategy::BellTrace => 2 * n_mixed + 1,
        _ => n_mixed + 1,
    };
    if width > MAX_SIM_QUBITS {
        return Err(Error::Parameter(format!(
            "{} needs {width} qubits, the simulator supports {MAX_SIM_QUBITS}",
            prep.name()
        )));
    }
    let mut noise = ResolvedNoise::new(model, now)?;
    let mut run = |mut rho: DensityMatrix, prep_gates: &[Gate]| -> Result<[f64; 3]> {
        for g in prep_gates.iter().chain(&[Gate::H(0)]).chain(payload.gates()) {
            noise.apply(&mut rho, g)?;
        }
        let mut out = [0.0; 3];
        for (slot, axis) in out.iter_mut().zip(PauliAxis::ALL) {
            let mut branch = rho.clone();
            for g in readout_rotation(axis, 0) {
                noise.apply(&mut branch, &g)?;
            }
            *slot = branch.expectation(PauliAxis::Z, 0)?;
        }
        Ok(out)
    };
    match prep {
        PrepStrategy::DirectMixed => {
            let rho = DensityMatrix::zero_state(1).tensor(&DensityMatrix::maximally_mixed(n_mixed));
            Ok(vec![run(rho, &[])?])
        }
        PrepStrategy::BellTrace => {
            // Ancilla n_mixed + j pairs with mixed qubit j.
            let gates: Vec<Gate> = (1..=n_mixed)
                .flat_map(|j| {
                    [
                        Gate::H(j),
                        Gate::Cnot {
                            control: j,
                            target: n_mixed + j,
                        },
                    ]
                })
                .collect();
            Ok(vec![run(DensityMatrix::zero_state(width), &gates)?])
        }
        PrepStrategy::FlipAverage => flip_patterns(n_mixed, seed)
            .into_iter()
            .map(|p| {
                let gates: Vec<Gate> = (1..=n_mixed)
                    .filter(|&j| p >> (n_mixed - j) & 1 == 1)
                    .map(Gate::X)
                    .collect();
                run(DensityMatrix::zero_state(width), &gates)
            })
            .collect(),
    }
}

/// Input bit patterns over the mixed qubits, qubit 1 most significant.
fn flip_patterns(n_mixed: usize, seed: u64) -> Vec<u64> {
    if n_mixed <= FLIP_EXHAUSTIVE_MAX {
        return (0..1u64 << n_mixed).collect();
    }
    let mut rng = seed::rng(seed::derive(seed, &[FLIP_TAG]));
    (0..FLIP_SAMPLES)
        .map(|_| rng.random_range(0..1u64 << n_mixed))
        .collect()
}
