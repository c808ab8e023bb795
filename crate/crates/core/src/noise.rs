//! Gate noise, shot sampling and calibration drift.
//!
//! Each gate is followed by a depolarizing channel with purity `α₁` (one
//! qubit) or `α₂` (CNOT). By default the channel acts on the whole register,
//! `ρ → α ρ + (1 − α) I/2^n`. The identity is a fixed point of every
//! subsequent gate, so a circuit with `k` CNOTs scales all Pauli expectations
//! by exactly `α₂^k`.
//!
//! CNOTs additionally carry a systematic over-rotation `ε`. Its value can
//! differ per qubit pair and wanders from day to day as a Gaussian random
//! walk, mimicking calibration drift.

use std::collections::{BTreeMap, HashMap};

use chrono::{DateTime, TimeZone, Utc};
use num_complex::Complex64;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::Gate;
use crate::qstate::{ComplexMatrix, DensityMatrix};
use crate::seed;
use crate::{Error, Result};

pub type Timestamp = DateTime<Utc>;

/// Purity per CNOT that yields a visibility decay constant of 25.81 CNOTs.
pub fn default_depol_2q() -> f64 {
    (-1.0f64 / 25.81).exp()
}

/// Assumed single-qubit purity, ten times closer to ideal than a CNOT.
pub fn default_depol_1q() -> f64 {
    (-1.0f64 / 250.0).exp()
}

pub fn default_epoch() -> Timestamp {
    Utc.with_ymd_and_hms(2019, 1, 1, 0, 0, 0).unwrap()
}

/// Shape of the systematic error attached to every CNOT.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoherentKind {
    /// `RZ(ε) = e^{−iεZ/2}` on the control qubit.
    #[default]
    ControlZ,
    /// `e^{−iε Z⊗Z/2}` on (control, target).
    Zz,
    /// `RX(ε) = e^{−iεX/2}` on the target qubit.
    TargetX,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepolScope {
    #[default]
    Global,
    /// Depolarize only the qubits the gate acts on.
    Local,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Drift {
    /// Standard deviation of the daily step of `ε`, in radians.
    pub sigma_per_day: f64,
    pub epoch: Timestamp,
    /// Seed of the walk; a property of the simulated device, shared by all
    /// runs so errors stay consistent within a day.
    pub seed: u64,
}

impl Default for Drift {
    fn default() -> Self {
        Self {
            sigma_per_day: 0.02,
            epoch: default_epoch(),
            seed: 0,
        }
    }
}

/// Per-pair overrides of the CNOT noise.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairNoise {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depol_2q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent_eps: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub coherent_eps: f64,
    pub coherent_kind: CoherentKind,
    pub depol_scope: DepolScope,
    pub drift: Drift,
    pub readout_flip: f64,
    /// Keyed by pair label `"<control name>-<target name>"`; either
    /// orientation matches.
    pub pair_profile: BTreeMap<String, PairNoise>,
    /// Physical names of the logical qubits; missing entries default to
    /// `q<index>`.
    pub qubit_names: Vec<String>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            depol_1q: default_depol_1q(),
            depol_2q: default_depol_2q(),
            coherent_eps: 0.05,
            coherent_kind: CoherentKind::default(),
            depol_scope: DepolScope::default(),
            drift: Drift::default(),
            readout_flip: 0.0,
            pair_profile: BTreeMap::new(),
            qubit_names: Vec::new(),
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            depol_1q: 1.0,
            depol_2q: 1.0,
            coherent_eps: 0.0,
            drift: Drift {
                sigma_per_day: 0.0,
                ..Drift::default()
            },
            ..Self::default()
        }
    }

    /// Only CNOT depolarization with purity `alpha`.
    pub fn depolarizing(alpha: f64) -> Self {
        Self {
            depol_2q: alpha,
            ..Self::noiseless()
        }
    }

    pub fn with_coherent(mut self, eps: f64) -> Self {
        self.coherent_eps = eps;
        self
    }

    /// Names the logical qubits after a hardware pair label `"A-B"`.
    pub fn on_pair(&self, pair: &str) -> Result<Self> {
        let (a, b) = pair
            .split_once('-')
            .filter(|(a, b)| !a.is_empty() && !b.is_empty())
            .ok_or_else(|| Error::Parameter(format!("qubit pair label {pair:?} is not of the form A-B")))?;
        let mut out = self.clone();
        out.qubit_names = vec![a.to_string(), b.to_string()];
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let purity = |name: &str, a: f64| {
            if a > 0.0 && a <= 1.0 {
                Ok(())
            } else {
                Err(Error::Noise(format!("{name} = {a} is outside (0, 1]")))
            }
        };
        purity("depol_1q", self.depol_1q)?;
        purity("depol_2q", self.depol_2q)?;
        if !self.coherent_eps.is_finite() {
            return Err(Error::Noise("coherent_eps must be finite".into()));
        }
        if !(0.0..0.5).contains(&self.readout_flip) {
            return Err(Error::Noise(format!(
                "readout_flip = {} is outside [0, 0.5)",
                self.readout_flip
            )));
        }
        if !(self.drift.sigma_per_day >= 0.0 && self.drift.sigma_per_day.is_finite()) {
            return Err(Error::Noise("drift.sigma_per_day must be finite and >= 0".into()));
        }
        for (label, p) in &self.pair_profile {
            if let Some(a) = p.depol_2q {
                purity(&format!("pair_profile.{label}.depol_2q"), a)?;
            }
            if p.coherent_eps.is_some_and(|e| !e.is_finite()) {
                return Err(Error::Noise(format!(
                    "pair_profile.{label}.coherent_eps must be finite"
                )));
            }
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.depol_1q == 1.0
            && self.depol_2q == 1.0
            && self.readout_flip == 0.0
            && self.coherent_eps == 0.0
            && self.drift.sigma_per_day == 0.0
            && self
                .pair_profile
                .values()
                .all(|p| p.depol_2q.is_none_or(|a| a == 1.0) && p.coherent_eps.is_none_or(|e| e == 0.0))
    }

    fn qubit_name(&self, q: usize) -> String {
        self.qubit_names.get(q).cloned().unwrap_or_else(|| format!("q{q}"))
    }

    pub fn pair_label(&self, control: usize, target: usize) -> String {
        format!("{}-{}", self.qubit_name(control), self.qubit_name(target))
    }

    fn pair_override(&self, control: usize, target: usize) -> Option<&PairNoise> {
        let (a, b) = (self.qubit_name(control), self.qubit_name(target));
        self.pair_profile
            .get(&format!("{a}-{b}"))
            .or_else(|| self.pair_profile.get(&format!("{b}-{a}")))
    }
}

fn elapsed_days(epoch: Timestamp, now: Timestamp) -> Result<u64> {
    let secs = (now - epoch).num_seconds();
    if secs < 0 {
        return Err(Error::Noise(format!("time {now} precedes the drift epoch {epoch}")));
    }
    Ok((secs / 86_400) as u64)
}

fn random_walk(start: f64, sigma: f64, days: u64, seed: u64) -> f64 {
    if sigma == 0.0 {
        return start;
    }
    let mut rng = seed::rng(seed);
    (0..days).fold(start, |x, _| {
        let step: f64 = StandardNormal.sample(&mut rng);
        x + sigma * step
    })
}

/// The model's `ε` after the Gaussian walk of whole days since the epoch.
pub fn drifted_eps(m: &NoiseModel, now: Timestamp, rng_seed: u64) -> Result<f64> {
    let days = elapsed_days(m.drift.epoch, now)?;
    Ok(random_walk(m.coherent_eps, m.drift.sigma_per_day, days, rng_seed))
}

/// Noise parameters of one CNOT pair at a fixed time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairParams {
    pub depol_2q: f64,
    pub eps: f64,
}

/// A [`NoiseModel`] evaluated at a fixed time, with drifted pair errors
/// cached.
#[derive(Debug)]
pub struct ResolvedNoise<'a> {
    model: &'a NoiseModel,
    days: u64,
    pairs: HashMap<(usize, usize), PairParams>,
}

impl<'a> ResolvedNoise<'a> {
    pub fn new(model: &'a NoiseModel, now: Timestamp) -> Result<Self> {
        Ok(Self {
            model,
            days: elapsed_days(model.drift.epoch, now)?,
            pairs: HashMap::new(),
        })
    }

    pub fn model(&self) -> &NoiseModel {
        self.model
    }

    pub fn pair(&mut self, control: usize, target: usize) -> PairParams {
        let m = self.model;
        let days = self.days;
        *self.pairs.entry((control, target)).or_insert_with(|| {
            let over = m.pair_override(control, target);
            let base = over.and_then(|p| p.coherent_eps).unwrap_or(m.coherent_eps);
            let alpha = over.and_then(|p| p.depol_2q).unwrap_or(m.depol_2q);
            // Walk the unordered pair so both orientations share one history.
            let (a, b) = (control.min(target), control.max(target));
            let walk_seed = seed::derive(m.drift.seed, &[seed::label_id(&m.pair_label(a, b))]);
            PairParams {
                depol_2q: alpha,
                eps: random_walk(base, m.drift.sigma_per_day, days, walk_seed),
            }
        })
    }

    /// Ideal gate, then the CNOT's coherent error, then depolarization.
    pub fn apply(&mut self, state: &mut DensityMatrix, gate: &Gate) -> Result<()> {
        let qubits = gate.qubits();
        state.apply_unitary_mut(&gate.matrix(), &qubits)?;
        let alpha = match *gate {
            Gate::Cnot { control, target } => {
                let p = self.pair(control, target);
                if p.eps != 0.0 {
                    let (u, on) = coherent_unitary(self.model.coherent_kind, p.eps, control, target);
                    state.apply_unitary_mut(&u, &on)?;
                }
                p.depol_2q
            }
            _ => self.model.depol_1q,
        };
        match self.model.depol_scope {
            DepolScope::Global => state.depolarize_global(alpha),
            DepolScope::Local => state.depolarize_local(alpha, &qubits)?,
        }
        Ok(())
    }
}

fn coherent_unitary(kind: CoherentKind, eps: f64, control: usize, target: usize) -> (ComplexMatrix, Vec<usize>) {
    let lo = Complex64::from_polar(1.0, -eps / 2.0);
    let hi = Complex64::from_polar(1.0, eps / 2.0);
    match kind {
        CoherentKind::ControlZ => (ComplexMatrix::diag(&[lo, hi]), vec![control]),
        CoherentKind::Zz => (ComplexMatrix::diag(&[lo, hi, hi, lo]), vec![control, target]),
        CoherentKind::TargetX => {
            let (s, c) = (eps / 2.0).sin_cos();
            let m = ComplexMatrix::from_vec(
                2,
                2,
                vec![
                    Complex64::new(c, 0.0),
                    Complex64::new(0.0, -s),
                    Complex64::new(0.0, -s),
                    Complex64::new(c, 0.0),
                ],
            )
            .expect("2x2 literal");
            (m, vec![target])
        }
    }
}

/// Applies `g` with the noise of `m` at time `now`.
pub fn apply_noisy_gate(state: &DensityMatrix, g: &Gate, m: &NoiseModel, now: Timestamp) -> Result<DensityMatrix> {
    let mut out = state.clone();
    ResolvedNoise::new(m, now)?.apply(&mut out, g)?;
    Ok(out)
}

/// A sampled expectation value in `[−1, 1]`.
///
/// `shots == 0` marks an exact (infinite-shot) value with zero error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub shots: u64,
}

impl ShotEstimate {
    pub fn new(mean: f64, shots: u64) -> Self {
        let stderr = if shots == 0 {
            0.0
        } else {
            ((1.0 - mean * mean).max(0.0) / shots as f64).sqrt()
        };
        Self { mean, stderr, shots }
    }

    pub fn exact(mean: f64) -> Self {
        Self::new(mean, 0)
    }
}

/// Draws `shots` ±1 outcomes whose +1 probability is
/// `(1 + (1 − 2·readout_flip)·E)/2` and returns their mean.
///
/// `shots == 0` returns the biased expectation exactly.
pub fn sample_shots(true_expectation: f64, shots: u64, readout_flip: f64, rng_seed: u64) -> ShotEstimate {
    let biased = (1.0 - 2.0 * readout_flip) * true_expectation;
    if shots == 0 {
        return ShotEstimate::exact(biased);
    }
    let p = ((1.0 + biased) / 2.0).clamp(0.0, 1.0);
    let mut rng = seed::rng(rng_seed);
    let ups = Binomial::new(shots, p).expect("p in [0, 1]").sample(&mut rng);
    ShotEstimate::new(2.0 * ups as f64 / shots as f64 - 1.0, shots)
}
