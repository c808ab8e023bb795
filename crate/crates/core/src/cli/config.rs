//! Experiment configuration: a JSON document with unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dqc1::{PrepStrategy, MAX_SIM_QUBITS};
use crate::knots::{distinguishing_pairs, BraidWord, Generator, WrithePhase};
use crate::noise::{NoiseModel, Timestamp};
use crate::{Error, Result};

/// Environment variable naming the parent directory for bundles whose
/// config has no `out`.
pub const OUT_ENV: &str = "DQC1BENCH_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    TraceSweep,
    Visibility,
    Knots,
    Oracle,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Self::TraceSweep => "trace-sweep",
            Self::Visibility => "visibility",
            Self::Knots => "knots",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    #[serde(default)]
    pub noise: NoiseModel,
    /// Repetitions per readout axis; 0 selects exact expectation values.
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default = "default_n_mixed")]
    pub n_mixed: Vec<usize>,
    /// Values of `l` for the θ sweeps.
    #[serde(default = "default_repetitions")]
    pub repetitions: Vec<usize>,
    #[serde(default)]
    pub prep: PrepStrategy,
    /// Restricts sweeps to one or three mixed qubits.
    #[serde(default)]
    pub replication: bool,
    /// Explicit braid words; when empty, powers of `generators` up to `k_max`.
    #[serde(default)]
    pub words: Vec<BraidWord>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_generators")]
    pub generators: Vec<Generator>,
    #[serde(default = "default_qubit_pairs")]
    pub qubit_pairs: Vec<String>,
    /// Word pairs whose Jones distance is reported; defaults to the
    /// equal-depth comparison set.
    #[serde(default = "default_compare")]
    pub compare: Vec<(BraidWord, BraidWord)>,
    #[serde(default)]
    pub phase: WrithePhase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Simulated wall-clock time of the run; defaults to the drift epoch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub now: Option<Timestamp>,
}

fn default_shots() -> u64 {
    1 << 15
}
fn default_trials() -> usize {
    12
}
fn default_grid() -> usize {
    crate::bench::DEFAULT_GRID
}
fn default_n_mixed() -> Vec<usize> {
    vec![1, 3]
}
fn default_repetitions() -> Vec<usize> {
    (0..=8).collect()
}
fn default_k_max() -> usize {
    9
}
fn default_generators() -> Vec<Generator> {
    vec![Generator::S12, Generator::S23]
}
fn default_qubit_pairs() -> Vec<String> {
    vec!["q0-q1".into()]
}
fn default_compare() -> Vec<(BraidWord, BraidWord)> {
    distinguishing_pairs()
}

impl ExperimentConfig {
    /// Built-in preset for `suite`.
    pub fn preset(suite: Suite) -> Self {
        let mut cfg: Self = serde_json::from_value(serde_json::json!({ "suite": suite })).expect("defaults parse");
        match suite {
            Suite::TraceSweep => {
                cfg.repetitions = vec![0, 1, 2, 4, 6];
                cfg.replication = true;
            }
            Suite::Visibility => cfg.replication = true,
            Suite::Knots => {
                cfg.shots = 1 << 12;
                cfg.prep = PrepStrategy::FlipAverage;
            }
            Suite::Oracle => cfg.shots = 0,
        }
        cfg
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.is_empty() {
                Error::Config(inner.to_string())
            } else {
                Error::Config(format!("{path}: {inner}"))
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        if let Err(e) = self.noise.validate() {
            let msg = e.to_string();
            return bad("noise", msg.trim_start_matches("invalid noise model: ").to_string());
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        if self.grid < 2 {
            return bad("grid", format!("needs at least 2 points, got {}", self.grid));
        }
        if matches!(self.suite, Suite::TraceSweep | Suite::Visibility) {
            if self.n_mixed.is_empty() {
                return bad("n_mixed", "must list at least one register size".into());
            }
            let limit = match self.prep {
                PrepStrategy::BellTrace => (MAX_SIM_QUBITS - 1) / 2,
                _ => MAX_SIM_QUBITS - 1,
            };
            for &n in &self.n_mixed {
                if n == 0 || n > limit {
                    return bad(
                        "n_mixed",
                        format!("{n} is outside 1..={limit} for {}", self.prep.name()),
                    );
                }
                if self.replication && n != 1 && n != 3 {
                    return bad("n_mixed", format!("{n} is not 1 or 3 (replication preset)"));
                }
            }
            if self.repetitions.is_empty() {
                return bad("repetitions", "must list at least one value".into());
            }
        }
        if self.suite == Suite::Knots {
            if self.qubit_pairs.is_empty() {
                return bad("qubit_pairs", "must list at least one pair".into());
            }
            for p in &self.qubit_pairs {
                if let Err(e) = self.noise.on_pair(p) {
                    return bad("qubit_pairs", e.to_string());
                }
            }
        }
        if matches!(self.suite, Suite::Knots | Suite::Oracle) && self.words.is_empty() && self.generators.is_empty() {
            return bad("generators", "needs a generator when no words are given".into());
        }
        Ok(())
    }

    pub fn resolved_words(&self) -> Vec<BraidWord> {
        if !self.words.is_empty() {
            return self.words.clone();
        }
        self.generators
            .iter()
            .flat_map(|&g| (0..=self.k_max).map(move |k| BraidWord::power(g, k)))
            .collect()
    }

    pub fn timestamp(&self) -> Timestamp {
        self.now.unwrap_or(self.noise.drift.epoch)
    }

    pub fn out_dir(&self) -> PathBuf {
        if let Some(out) = &self.out {
            return out.clone();
        }
        let base = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("results"), PathBuf::from);
        base.join(self.suite.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for s in [Suite::TraceSweep, Suite::Visibility, Suite::Knots, Suite::Oracle] {
            let cfg = ExperimentConfig::preset(s);
            cfg.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&cfg.to_json()).unwrap(), cfg);
        }
    }

    #[test]
    fn errors_name_the_key() {
        let e = ExperimentConfig::from_json(r#"{"suite": "knots", "shot": 3}"#).unwrap_err();
        assert!(e.to_string().contains("shot"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"suite": "knots", "noise": {"depol_2q": "x"}}"#).unwrap_err();
        assert!(e.to_string().contains("noise.depol_2q"), "{e}");
        let e =
            ExperimentConfig::from_json(r#"{"suite": "visibility", "n_mixed": [2], "replication": true}"#).unwrap_err();
        assert!(e.to_string().contains("n_mixed"), "{e}");
        let e = ExperimentConfig::from_json(r#"{"suite": "knots", "noise": {"depol_2q": 1.5}}"#).unwrap_err();
        assert!(e.to_string().contains("depol_2q"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn preset_words() {
        let words = ExperimentConfig::preset(Suite::Knots).resolved_words();
        assert_eq!(words.len(), 20);
        assert_eq!(words[0], BraidWord::default());
        assert_eq!(words[10], BraidWord::default());
        assert_eq!(words[19].to_string(), "S23^9");
    }
}
