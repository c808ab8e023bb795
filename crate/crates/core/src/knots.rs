//! Jones polynomial of three-strand braid closures at `t = e^{2πi/5}`.
//!
//! The Fibonacci representation maps each crossing to a 4×4 block-diagonal
//! unitary. The upper block spans `|00⟩, |01⟩`, the lower `|10⟩, |11⟩`, and
//! `|11⟩` is unused. A braid's Jones value follows from the weighted trace
//! `φ·tr U^{(u)} + tr U^{(l)} − 1` and a writhe-dependent phase. On hardware
//! each block trace is estimated with its own one-clean-qubit experiment.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{compile_controlled_2x2, Circuit};
use crate::dqc1::{estimate_normalized_trace, PrepStrategy};
use crate::noise::{NoiseModel, Timestamp};
use crate::qstate::ComplexMatrix;
use crate::seed;
use crate::{Error, Result};

/// Per-crossing CNOT budgets for the upper block of `σ12`, the upper block
/// of `σ23`, and either lower block.
pub const UPPER_S12_CNOTS: usize = 2;
pub const UPPER_S23_CNOTS: usize = 5;
pub const LOWER_CNOTS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Generator {
    S12,
    S23,
    #[serde(rename = "S12inv")]
    S12Inv,
    #[serde(rename = "S23inv")]
    S23Inv,
}

impl Generator {
    pub fn inverse(self) -> Self {
        match self {
            Self::S12 => Self::S12Inv,
            Self::S23 => Self::S23Inv,
            Self::S12Inv => Self::S12,
            Self::S23Inv => Self::S23,
        }
    }

    /// +1 for left-over-right crossings, −1 for their inverses.
    pub fn sign(self) -> i64 {
        match self {
            Self::S12 | Self::S23 => 1,
            Self::S12Inv | Self::S23Inv => -1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::S12 => "S12",
            Self::S23 => "S23",
            Self::S12Inv => "S12inv",
            Self::S23Inv => "S23inv",
        }
    }

    /// The 4×4 Fibonacci-representation matrix.
    pub fn matrix(self) -> ComplexMatrix {
        let f = FibConstants::new();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let s12 = ComplexMatrix::diag(&[f.a, f.b, f.a, one]);
        let s23 = ComplexMatrix::from_rows(&[
            [f.e, f.d, zero, zero],
            [f.d, f.c, zero, zero],
            [zero, zero, f.a, zero],
            [zero, zero, zero, one],
        ])
        .expect("4x4 literal");
        match self {
            Self::S12 => s12,
            Self::S23 => s23,
            Self::S12Inv => s12.adjoint(),
            Self::S23Inv => s23.adjoint(),
        }
    }

    fn upper_budget(self) -> usize {
        match self {
            Self::S12 | Self::S12Inv => UPPER_S12_CNOTS,
            Self::S23 | Self::S23Inv => UPPER_S23_CNOTS,
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s12" => Ok(Self::S12),
            "s23" => Ok(Self::S23),
            "s12inv" => Ok(Self::S12Inv),
            "s23inv" => Ok(Self::S23Inv),
            _ => Err(Error::Parameter(format!("unknown braid generator {s:?}"))),
        }
    }
}

/// A braid on three strands, crossings listed in time order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BraidWord {
    pub generators: Vec<Generator>,
}

impl BraidWord {
    pub const STRANDS: usize = 3;

    pub fn new(generators: Vec<Generator>) -> Self {
        Self { generators }
    }

    pub fn power(g: Generator, k: usize) -> Self {
        Self::new(vec![g; k])
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self::new(self.generators.iter().chain(&other.generators).copied().collect())
    }

    /// Reversed word of inverse crossings.
    pub fn inverse(&self) -> Self {
        Self::new(self.generators.iter().rev().map(|g| g.inverse()).collect())
    }
}

/// Parses whitespace or comma separated tokens such as `S12 S23inv^2`;
/// `id` or an empty string is the identity braid.
impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut generators = Vec::new();
        for tok in s
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            if tok.eq_ignore_ascii_case("id") {
                continue;
            }
            let (name, k) = match tok.split_once('^') {
                Some((name, k)) => (
                    name,
                    k.parse::<usize>()
                        .map_err(|_| Error::Parameter(format!("bad exponent in braid token {tok:?}")))?,
                ),
                None => (tok, 1),
            };
            let g: Generator = name.parse()?;
            generators.extend(std::iter::repeat_n(g, k));
        }
        Ok(Self::new(generators))
    }
}

/// Run-length form, e.g. `S12^3 S23inv`; the identity prints as `id`.
impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("id");
        }
        let mut runs: Vec<(Generator, usize)> = Vec::new();
        for &g in &self.generators {
            match runs.last_mut() {
                Some((h, n)) if *h == g => *n += 1,
                _ => runs.push((g, 1)),
            }
        }
        for (i, (g, n)) in runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(g.name())?;
            if *n > 1 {
                write!(f, "^{n}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for BraidWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BraidWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FibConstants {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub phi: f64,
}

impl FibConstants {
    pub fn new() -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let a = Complex64::from_polar(1.0, 3.0 * PI / 5.0);
        let b = Complex64::from_polar(1.0, -4.0 * PI / 5.0);
        Self {
            a,
            b,
            c: b / (phi * phi) + a / phi,
            d: (b - a) / phi.powf(1.5),
            e: b / phi + a / (phi * phi),
            phi,
        }
    }
}

impl Default for FibConstants {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockPair {
    pub upper: ComplexMatrix,
    pub lower: ComplexMatrix,
}

impl BlockPair {
    pub fn of(u: &ComplexMatrix) -> Self {
        Self {
            upper: u.block(0, 2),
            lower: u.block(2, 2),
        }
    }

    pub fn reassemble(&self) -> ComplexMatrix {
        self.upper.direct_sum(&self.lower)
    }
}

/// Product of the word's generator matrices, the first crossing acting
/// first.
pub fn braid_matrix(w: &BraidWord) -> ComplexMatrix {
    w.generators
        .iter()
        .fold(ComplexMatrix::identity(4), |acc, g| &g.matrix() * &acc)
}

pub fn writhe(w: &BraidWord) -> i64 {
    w.generators.iter().map(|g| g.sign()).sum()
}

/// `φ·tr_upper + tr_lower − 1` for unnormalized 2×2 block traces.
pub fn weighted_trace(tr_upper: Complex64, tr_lower: Complex64) -> Complex64 {
    FibConstants::new().phi * tr_upper + tr_lower - 1.0
}

/// Convention for the writhe phase `t^{p·w}` with `t = e^{2πi/5}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WrithePhase {
    /// `t^{3w}`: gives the standard values for the unknot, Hopf link and
    /// trefoil closures.
    #[default]
    Standard,
    /// `(−t⁴)^{3w}`, which equals `t^{3w}·(−t)^{3w}`; kept for comparison.
    AsPrinted,
}

impl WrithePhase {
    pub fn prefactor(self, w: i64) -> Complex64 {
        let t_arg = 2.0 * PI / 5.0;
        let exponent = 3.0 * w as f64;
        match self {
            Self::Standard => Complex64::from_polar(1.0, t_arg * exponent),
            // −t⁴ = e^{iπ}·e^{8πi/5}
            Self::AsPrinted => Complex64::from_polar(1.0, (PI + 4.0 * t_arg) * exponent),
        }
    }
}

pub fn jones_value(wtr: Complex64, w: i64) -> Complex64 {
    jones_value_with(wtr, w, WrithePhase::Standard)
}

pub fn jones_value_with(wtr: Complex64, w: i64, phase: WrithePhase) -> Complex64 {
    phase.prefactor(w) * wtr / FibConstants::new().phi
}

pub fn jones_oracle(w: &BraidWord) -> Complex64 {
    jones_oracle_with(w, WrithePhase::Standard)
}

/// Exact Jones value from the braid matrix.
pub fn jones_oracle_with(w: &BraidWord, phase: WrithePhase) -> Complex64 {
    let blocks = BlockPair::of(&braid_matrix(w));
    jones_value_with(
        weighted_trace(blocks.upper.trace(), blocks.lower.trace()),
        writhe(w),
        phase,
    )
}

/// Value the estimate approaches when every block coherence is destroyed.
pub fn noise_fixed_point(w: i64) -> Complex64 {
    jones_value(Complex64::new(-1.0, 0.0), w)
}

/// Controlled upper and lower block circuits on two qubits, compiled crossing
/// by crossing at the fixed per-crossing budgets.
pub fn block_circuits(w: &BraidWord) -> Result<(Circuit, Circuit)> {
    let mut upper = Circuit::new(2, format!("{w} upper"));
    let mut lower = Circuit::new(2, format!("{w} lower"));
    let mut cache: Vec<(Generator, Circuit, Circuit)> = Vec::new();
    for &g in &w.generators {
        if !cache.iter().any(|(h, ..)| *h == g) {
            let blocks = BlockPair::of(&g.matrix());
            let cu = compile_controlled_2x2(&blocks.upper, Some(g.upper_budget()))?;
            let cl = compile_controlled_2x2(&blocks.lower, Some(LOWER_CNOTS))?;
            cache.push((g, cu, cl));
        }
        let (_, cu, cl) = cache.iter().find(|(h, ..)| *h == g).expect("cached above");
        upper.append(cu)?;
        lower.append(cl)?;
    }
    Ok((upper, lower))
}

/// Settings of a Jones estimation besides the word, noise and clock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JonesRun {
    pub shots: u64,
    pub trials: usize,
    pub qubit_pair: String,
    pub seed: u64,
    pub prep: PrepStrategy,
    pub phase: WrithePhase,
}

impl JonesRun {
    pub fn new(shots: u64, trials: usize, qubit_pair: impl Into<String>, seed: u64) -> Self {
        Self {
            shots,
            trials,
            qubit_pair: qubit_pair.into(),
            seed,
            prep: PrepStrategy::FlipAverage,
            phase: WrithePhase::Standard,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JonesEstimate {
    pub word: BraidWord,
    pub writhe: i64,
    /// Equal to `mean`.
    pub value: Complex64,
    pub trials: usize,
    pub shots_per_trial: u64,
    pub mean: Complex64,
    /// Covariance of (Re, Im) across trials, with `n − 1` normalization.
    pub cov: [[f64; 2]; 2],
    pub cnots_upper: usize,
    pub cnots_lower: usize,
    pub qubit_pair: String,
    pub timestamp: Timestamp,
    pub samples: Vec<Complex64>,
    pub trial_seeds: Vec<u64>,
}

pub fn estimate_jones(
    w: &BraidWord,
    model: &NoiseModel,
    shots: u64,
    trials: usize,
    qubit_pair: &str,
    seed: u64,
    now: Timestamp,
) -> Result<JonesEstimate> {
    estimate_jones_with(w, model, &JonesRun::new(shots, trials, qubit_pair, seed), now)
}

/// Runs `trials` independent upper/lower block experiments and combines
/// each pair into a Jones value.
///
/// The blocks are separate runs: they get their own shot seeds and their own
/// drift history.
pub fn estimate_jones_with(w: &BraidWord, model: &NoiseModel, run: &JonesRun, now: Timestamp) -> Result<JonesEstimate> {
    if run.trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let (upper, lower) = block_circuits(w)?;
    let paired = model.on_pair(&run.qubit_pair)?;
    let block_models: Vec<NoiseModel> = (0..2u64)
        .map(|b| {
            let mut m = paired.clone();
            m.drift.seed = seed::derive(m.drift.seed, &[b]);
            m
        })
        .collect();
    let wr = writhe(w);
    let trial_seeds: Vec<u64> = (0..run.trials as u64).map(|t| seed::derive(run.seed, &[t])).collect();
    let samples = trial_seeds
        .par_iter()
        .map(|&ts| {
            let mut tr = [Complex64::new(0.0, 0.0); 2];
            for (b, (circ, m)) in [&upper, &lower].into_iter().zip(&block_models).enumerate() {
                let est =
                    estimate_normalized_trace(circ, 1, run.prep, m, run.shots, seed::derive(ts, &[b as u64]), now)?;
                tr[b] = 2.0 * est.value();
            }
            Ok(jones_value_with(weighted_trace(tr[0], tr[1]), wr, run.phase))
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let (mean, cov) = sample_stats(&samples);
    Ok(JonesEstimate {
        word: w.clone(),
        writhe: wr,
        value: mean,
        trials: run.trials,
        shots_per_trial: run.shots,
        mean,
        cov,
        cnots_upper: upper.cnot_count(),
        cnots_lower: lower.cnot_count(),
        qubit_pair: run.qubit_pair.clone(),
        timestamp: now,
        samples,
        trial_seeds,
    })
}

/// Mean and (Re, Im) covariance with `n − 1` normalization; the covariance
/// is zero for a single sample.
pub fn sample_stats(samples: &[Complex64]) -> (Complex64, [[f64; 2]; 2]) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<Complex64>() / n;
    let mut cov = [[0.0; 2]; 2];
    if samples.len() > 1 {
        for s in samples {
            let d = [s.re - mean.re, s.im - mean.im];
            for (i, row) in cov.iter_mut().enumerate() {
                for (j, x) in row.iter_mut().enumerate() {
                    *x += d[i] * d[j] / (n - 1.0);
                }
            }
        }
    }
    (mean, cov)
}

/// `|mean₁ − mean₂|` with its standard error, optionally divided by
/// `reference` (for example the exact distance of the same pair).
pub fn knot_distance(
    e1: &JonesEstimate,
    e2: &JonesEstimate,
    normalize: bool,
    reference: Option<f64>,
) -> Result<(f64, f64)> {
    let scale = match (normalize, reference) {
        (false, _) => 1.0,
        (true, Some(r)) if r != 0.0 && r.is_finite() => r.abs(),
        (true, _) => {
            return Err(Error::Parameter(
                "normalized distance needs a nonzero reference value".into(),
            ))
        }
    };
    let diff = e1.mean - e2.mean;
    let dist = diff.norm();
    let mut v = [[0.0; 2]; 2];
    for (i, row) in v.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = e1.cov[i][j] / e1.trials as f64 + e2.cov[i][j] / e2.trials as f64;
        }
    }
    let var = if dist > 0.0 {
        let u = [diff.re / dist, diff.im / dist];
        u[0] * u[0] * v[0][0] + 2.0 * u[0] * u[1] * v[0][1] + u[1] * u[1] * v[1][1]
    } else {
        (v[0][0] + v[1][1]) / 2.0
    };
    Ok((dist / scale, var.max(0.0).sqrt() / scale))
}

/// `σ12^k` and `σ23^k` for `k = 0..=k_max`, all `σ12` powers first.
pub fn power_words(k_max: usize) -> Vec<BraidWord> {
    [Generator::S12, Generator::S23]
        .into_iter()
        .flat_map(|g| (0..=k_max).map(move |k| BraidWord::power(g, k)))
        .collect()
}

/// Word pairs of similar circuit depth compared for distinguishability.
pub fn distinguishing_pairs() -> Vec<(BraidWord, BraidWord)> {
    [(1, 2), (1, 3), (2, 5), (3, 7), (3, 8)]
        .into_iter()
        .map(|(k23, k12)| {
            (
                BraidWord::power(Generator::S23, k23),
                BraidWord::power(Generator::S12, k12),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::controlled;
    use crate::noise::default_epoch;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn word(s: &str) -> BraidWord {
        s.parse().unwrap()
    }

    fn t_pow(x: f64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI / 5.0 * x)
    }

    #[test]
    fn constants_are_unit_modulus_and_generators_unitary() {
        let f = FibConstants::new();
        assert!((f.a.norm() - 1.0).abs() < 1e-12 && (f.b.norm() - 1.0).abs() < 1e-12);
        for g in [Generator::S12, Generator::S23, Generator::S12Inv, Generator::S23Inv] {
            assert!(g.matrix().is_unitary(1e-10), "{g:?}");
        }
    }

    #[test]
    fn braid_relation() {
        let w1 = braid_matrix(&word("S12 S23 S12"));
        let w2 = braid_matrix(&word("S23 S12 S23"));
        assert!(w1.max_abs_diff(&w2) < 1e-10);
    }

    #[test]
    fn parse_and_display() {
        let w = word("S12^3, s23inv S23inv S12");
        assert_eq!(w.len(), 6);
        assert_eq!(w.to_string(), "S12^3 S23inv^2 S12");
        assert_eq!(word(&w.to_string()), w);
        assert_eq!(word("id"), BraidWord::default());
        assert_eq!(BraidWord::default().to_string(), "id");
        assert!("S13".parse::<BraidWord>().is_err());
        assert!("S12^x".parse::<BraidWord>().is_err());
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<BraidWord>(&json).unwrap(), w);
    }

    #[test]
    fn braid_matrix_examples() {
        assert!(braid_matrix(&BraidWord::default()).max_abs_diff(&ComplexMatrix::identity(4)) == 0.0);
        let f = FibConstants::new();
        let expect = ComplexMatrix::diag(&[f.a, f.b, f.a, c(1.0, 0.0)]);
        assert!(braid_matrix(&word("S12")).max_abs_diff(&expect) < 1e-15);
        assert!(braid_matrix(&word("S12 S12inv")).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        // The first crossing acts first.
        let w = word("S12 S23");
        let manual = &Generator::S23.matrix() * &Generator::S12.matrix();
        assert!(braid_matrix(&w).max_abs_diff(&manual) < 1e-15);
    }

    #[test]
    fn writhe_examples() {
        assert_eq!(writhe(&BraidWord::default()), 0);
        assert_eq!(writhe(&word("S12^3")), 3);
        assert_eq!(writhe(&word("S12 S23inv S12")), 1);
    }

    #[test]
    fn weighted_trace_examples() {
        let f = FibConstants::new();
        assert!((weighted_trace(c(2.0, 0.0), c(2.0, 0.0)) - c(2.0 * f.phi + 1.0, 0.0)).norm() < 1e-12);
        assert!((weighted_trace(c(2.0, 0.0), c(2.0, 0.0)).re - 4.2361).abs() < 1e-4);
        assert!((weighted_trace(f.a + f.b, f.a + 1.0) - (f.phi * (f.a + f.b) + f.a)).norm() < 1e-12);
        assert_eq!(weighted_trace(c(0.0, 0.0), c(0.0, 0.0)), c(-1.0, 0.0));
    }

    #[test]
    fn identity_braid_is_three_component_unlink() {
        let f = FibConstants::new();
        let v = jones_oracle(&BraidWord::default());
        assert!((v - c(f.phi * f.phi, 0.0)).norm() < 1e-10);
        // (−t^{1/2} − t^{−1/2})² at t = e^{2πi/5}
        let loop_value = -(t_pow(0.5) + t_pow(-0.5));
        assert!((v - loop_value * loop_value).norm() < 1e-12);
    }

    #[test]
    fn small_closures_match_known_polynomials() {
        let f = FibConstants::new();
        // Half-integer powers use the branch √t = −e^{iπ/5}.
        let sqrt_t = -t_pow(0.5);
        let unknot_factor = -(sqrt_t + sqrt_t.inv());
        assert!((unknot_factor - f.phi).norm() < 1e-12);
        // σ12: two-component unlink.
        assert!((jones_oracle(&word("S12")) - unknot_factor).norm() < 1e-10);
        // σ12²: Hopf link with a split unknot.
        let hopf = -(sqrt_t.powi(-1) + sqrt_t.powi(-5));
        assert!((jones_oracle(&word("S12^2")) - f.phi * hopf).norm() < 1e-10);
        // σ12³: trefoil with a split unknot.
        let trefoil = -t_pow(-4.0) + t_pow(-3.0) + t_pow(-1.0);
        assert!((jones_oracle(&word("S12^3")) - f.phi * trefoil).norm() < 1e-10);
    }

    #[test]
    fn oracle_values_for_powers() {
        // Computed independently from the closed-form block traces.
        let expected = [
            c(2.618034, 0.0),
            c(1.618034, 0.0),
            c(-0.309017, -0.951057),
            c(-1.309017, -2.126627),
        ];
        for (k, e) in expected.iter().enumerate() {
            let v = jones_oracle(&BraidWord::power(Generator::S12, k));
            assert!((v - e).norm() < 1e-5, "k={k}: {v}");
        }
    }

    #[test]
    fn conjugate_powers_share_oracle_values() {
        for k in 0..10 {
            let a = jones_oracle(&BraidWord::power(Generator::S12, k));
            let b = jones_oracle(&BraidWord::power(Generator::S23, k));
            assert!((a - b).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn printed_phase_differs_by_unit_factor() {
        let wtr = c(0.3, -1.2);
        let (v0, v5) = (
            jones_value_with(wtr, 0, WrithePhase::AsPrinted),
            jones_value_with(wtr, 5, WrithePhase::AsPrinted),
        );
        assert!((v0.norm() - v5.norm()).abs() < 1e-12);
        let expect = (-t_pow(4.0)).powi(15);
        assert!((v5 - v0 * expect).norm() < 1e-12);
        assert!((WrithePhase::Standard.prefactor(2) - t_pow(6.0)).norm() < 1e-12);
    }

    #[test]
    fn block_budgets() {
        let count = |s: &str| {
            let (u, l) = block_circuits(&word(s)).unwrap();
            (u.cnot_count(), l.cnot_count())
        };
        assert_eq!(count("S12^3"), (6, 6));
        assert_eq!(count("S23^3"), (15, 6));
        assert_eq!(count("id"), (0, 0));
        assert_eq!(count("S23inv S12"), (7, 4));
    }

    #[test]
    fn block_circuits_reproduce_blocks() {
        for s in ["S12^3", "S23^3", "S12 S23inv S23 S12inv S23^2"] {
            let w = word(s);
            let blocks = BlockPair::of(&braid_matrix(&w));
            assert!(blocks.reassemble().max_abs_diff(&braid_matrix(&w)) < 1e-15);
            let (u, l) = block_circuits(&w).unwrap();
            assert!(
                u.unitary().phase_distance(&controlled(&blocks.upper)) < 1e-8,
                "{s} upper"
            );
            assert!(
                l.unitary().phase_distance(&controlled(&blocks.lower)) < 1e-8,
                "{s} lower"
            );
            assert!(blocks.lower.is_diagonal(1e-12));
        }
    }

    #[test]
    fn noiseless_estimates_match_oracle() {
        for w in power_words(9) {
            let est = estimate_jones(&w, &NoiseModel::noiseless(), 0, 2, "q0-q1", 5, default_epoch()).unwrap();
            assert!((est.value - jones_oracle(&w)).norm() < 1e-8, "{w}");
            assert_eq!(est.cov, [[0.0; 2]; 2]);
        }
    }

    #[test]
    fn depolarized_estimates_shrink_to_fixed_point() {
        let w = word("S23^3");
        let oracle = jones_oracle(&w);
        let fp = noise_fixed_point(writhe(&w));
        let mut last = (oracle - fp).norm();
        for alpha in [0.95, 0.8, 0.5, 0.1] {
            let est = estimate_jones(&w, &NoiseModel::depolarizing(alpha), 0, 1, "q0-q1", 0, default_epoch()).unwrap();
            let gap = (est.value - fp).norm();
            assert!(gap < last, "α={alpha}");
            last = gap;
        }
        assert!(last < 0.01);
    }

    #[test]
    fn distance_statistics() {
        let est = estimate_jones(
            &word("S23"),
            &NoiseModel::default(),
            1 << 12,
            12,
            "q0-q1",
            1,
            default_epoch(),
        )
        .unwrap();
        assert_eq!(est.samples.len(), 12);
        assert_eq!(est.cov[0][1], est.cov[1][0]);
        assert!(est.cov[0][0] >= 0.0 && est.cov[0][0] * est.cov[1][1] >= est.cov[0][1].powi(2) - 1e-15);
        assert_eq!(knot_distance(&est, &est, false, None).unwrap().0, 0.0);
        assert!(knot_distance(&est, &est, true, None).is_err());
        let other = estimate_jones(
            &word("S12^3"),
            &NoiseModel::default(),
            1 << 12,
            12,
            "q0-q1",
            2,
            default_epoch(),
        )
        .unwrap();
        let (d, e) = knot_distance(&est, &other, false, None).unwrap();
        let (dn, en) = knot_distance(&est, &other, true, Some(2.0)).unwrap();
        assert!(e > 0.0 && (dn - d / 2.0).abs() < 1e-15 && (en - e / 2.0).abs() < 1e-15);
        assert!(estimate_jones(&word("S23"), &NoiseModel::default(), 16, 0, "q0-q1", 1, default_epoch()).is_err());
    }

    fn arb_word(max: usize) -> impl Strategy<Value = BraidWord> {
        proptest::collection::vec(0usize..4, 0..=max).prop_map(|v| {
            BraidWord::new(
                v.into_iter()
                    .map(|i| [Generator::S12, Generator::S23, Generator::S12Inv, Generator::S23Inv][i])
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn braid_products_are_unitary(w in arb_word(9)) {
            prop_assert!(braid_matrix(&w).is_unitary(1e-9));
        }

        #[test]
        fn word_times_inverse_is_identity(w in arb_word(9)) {
            let u = braid_matrix(&w.concat(&w.inverse()));
            prop_assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-9);
        }

        #[test]
        fn writhe_is_additive(a in arb_word(9), b in arb_word(9)) {
            prop_assert_eq!(writhe(&a.concat(&b)), writhe(&a) + writhe(&b));
        }
    }
}
