//! Command-line front end: run experiment suites into result bundles and
//! regenerate reports from them.
//!
//! A bundle is a directory holding the effective `config.json`, CSV data,
//! `summary.json`, SVG plots and `report.md`. Everything except
//! `timing.json` is a deterministic function of the config.

pub mod config;
pub mod data;
pub mod report;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{NaiveDate, TimeZone, Utc};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{sweep_payload, visibility_decay, SweepSpec};
use crate::circuit::Circuit;
use crate::knots::{block_circuits, estimate_jones_with, JonesRun};
use crate::noise::Timestamp;
use crate::seed;
use crate::{Error, Result};
pub use config::{ExperimentConfig, Suite};

pub const CONFIG_JSON: &str = "config.json";
pub const SUMMARY_JSON: &str = "summary.json";
pub const TIMING_JSON: &str = "timing.json";
pub const CIRCUITS_JSON: &str = "circuits.json";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug)]
pub struct ResultBundle {
    pub dir: PathBuf,
    pub config: ExperimentConfig,
    pub csv: Vec<PathBuf>,
    pub summary: PathBuf,
    pub svg: Vec<PathBuf>,
    pub version: &'static str,
    pub wall_clock_secs: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: Suite,
    version: &'static str,
    seed: u64,
    shots: u64,
    timestamp: String,
    #[serde(flatten)]
    analysis: report::Analysis,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_note: Option<&'a str>,
}

#[derive(Serialize)]
struct NamedCircuit {
    name: String,
    cnots: usize,
    circuit: serde_json::Value,
}

/// Runs the configured suite and writes its bundle atomically.
pub fn run(cfg: &ExperimentConfig, dump_circuits: bool) -> Result<ResultBundle> {
    cfg.validate()?;
    let start = Instant::now();
    let out = cfg.out_dir();
    let name = out
        .file_name()
        .ok_or_else(|| Error::Config(format!("out: {} has no directory name", out.display())))?
        .to_string_lossy()
        .into_owned();
    let parent = out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    let tmp = parent.join(format!(".{name}.tmp-{}", std::process::id()));
    if tmp.exists() {
        std::fs::remove_dir_all(&tmp).map_err(|e| Error::io(&tmp, e))?;
    }
    std::fs::create_dir(&tmp).map_err(|e| Error::io(&tmp, e))?;
    let result = fill_bundle(cfg, &tmp, dump_circuits);
    if let Err(e) = result {
        let _ = std::fs::remove_dir_all(&tmp);
        return Err(e);
    }
    let (csv, svg) = result.expect("checked above");
    let wall = start.elapsed().as_secs_f64();
    let timing = serde_json::json!({ "version": VERSION, "wall_clock_secs": wall });
    write(
        &tmp.join(TIMING_JSON),
        &(serde_json::to_string_pretty(&timing).expect("json") + "\n"),
    )?;
    if out.exists() {
        if !out.join(CONFIG_JSON).exists() {
            let _ = std::fs::remove_dir_all(&tmp);
            return Err(Error::io(
                &out,
                std::io::Error::new(std::io::ErrorKind::AlreadyExists, "exists and is not a result bundle"),
            ));
        }
        std::fs::remove_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    }
    std::fs::rename(&tmp, &out).map_err(|e| Error::io(&out, e))?;
    let moved = |v: Vec<PathBuf>| v.into_iter().map(|p| out.join(p.file_name().expect("file"))).collect();
    Ok(ResultBundle {
        summary: out.join(SUMMARY_JSON),
        csv: moved(csv),
        svg: moved(svg),
        dir: out,
        config: cfg.clone(),
        version: VERSION,
        wall_clock_secs: wall,
    })
}

pub fn run_file(path: &Path, dump_circuits: bool) -> Result<ResultBundle> {
    run(&ExperimentConfig::load(path)?, dump_circuits)
}

fn write(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn fill_bundle(cfg: &ExperimentConfig, dir: &Path, dump_circuits: bool) -> Result<(Vec<PathBuf>, Vec<PathBuf>)> {
    write(&dir.join(CONFIG_JSON), &cfg.to_json())?;
    let now = cfg.timestamp();
    let mut csv = Vec::new();
    let mut circuits: Vec<NamedCircuit> = Vec::new();
    let mut dump = |name: String, c: &Circuit| {
        circuits.push(NamedCircuit {
            name,
            cnots: c.cnot_count(),
            circuit: serde_json::from_str(&c.to_json()).expect("circuit json"),
        })
    };
    match cfg.suite {
        Suite::TraceSweep | Suite::Visibility => {
            let mut curves = Vec::new();
            for &n in &cfg.n_mixed {
                let spec = SweepSpec {
                    n_mixed: n,
                    l: 0,
                    grid: cfg.grid,
                    shots: cfg.shots,
                    seed: cfg.seed,
                    prep: cfg.prep,
                };
                curves.extend(visibility_decay(&spec, &cfg.repetitions, &cfg.noise, now)?);
                if dump_circuits {
                    for &l in &cfg.repetitions {
                        dump(
                            format!("N={n} l={l} theta=pi/2"),
                            &sweep_payload(n, l, std::f64::consts::FRAC_PI_2)?,
                        );
                    }
                }
            }
            let p = dir.join(data::SWEEP_CSV);
            data::write_rows(&p, &data::sweep_rows(&curves))?;
            csv.push(p);
        }
        Suite::Knots => {
            let words = cfg.resolved_words();
            let jobs: Vec<(usize, &String, usize)> = cfg
                .qubit_pairs
                .iter()
                .enumerate()
                .flat_map(|(pi, pair)| (0..words.len()).map(move |wi| (pi, pair, wi)))
                .collect();
            let estimates = jobs
                .par_iter()
                .map(|&(_, pair, wi)| {
                    let run = JonesRun {
                        shots: cfg.shots,
                        trials: cfg.trials,
                        qubit_pair: pair.clone(),
                        seed: seed::derive(cfg.seed, &[seed::label_id(pair), wi as u64]),
                        prep: cfg.prep,
                        phase: cfg.phase,
                    };
                    estimate_jones_with(&words[wi], &cfg.noise, &run, now)
                })
                .collect::<Result<Vec<_>>>()?;
            if dump_circuits {
                for w in &words {
                    let (u, l) = block_circuits(w)?;
                    dump(format!("{w} upper"), &u);
                    dump(format!("{w} lower"), &l);
                }
            }
            let p = dir.join(data::KNOTS_CSV);
            data::write_rows(&p, &data::knot_rows(&estimates))?;
            csv.push(p);
        }
        Suite::Oracle => {
            let p = dir.join(data::ORACLE_CSV);
            data::write_rows(&p, &data::oracle_rows(&cfg.resolved_words(), cfg.phase))?;
            csv.push(p);
        }
    }
    if dump_circuits {
        write(
            &dir.join(CIRCUITS_JSON),
            &(serde_json::to_string_pretty(&circuits).expect("json") + "\n"),
        )?;
    }
    let analysis = report::BundleData::load(dir)?.analyze();
    let summary = Summary {
        suite: cfg.suite,
        version: VERSION,
        seed: cfg.seed,
        shots: cfg.shots,
        timestamp: data::format_time(now),
        analysis,
        config_note: (cfg.shots == 0).then_some("shots = 0: exact expectation values"),
    };
    write(
        &dir.join(SUMMARY_JSON),
        &(serde_json::to_string_pretty(&summary).expect("json") + "\n"),
    )?;
    let svg = report::report(dir)?
        .into_iter()
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();
    Ok((csv, svg))
}

#[derive(Parser, Debug)]
#[command(
    name = "dqc1bench",
    version,
    about = "One-clean-qubit benchmarks on a noisy density-matrix simulator"
)]
struct Cli {
    /// Experiment config (JSON); subcommands fall back to a built-in preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output bundle directory (for `report` with several bundles: where
    /// the overlay goes).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the compiled circuits to circuits.json.
    #[arg(long, global = true)]
    dump_circuit: bool,
    /// Use exact expectation values instead of sampled shots.
    #[arg(long, global = true)]
    infinite_shots: bool,
    /// Simulated run time, RFC 3339 or YYYY-MM-DD (UTC).
    #[arg(long, global = true)]
    now: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the suite named in a config file.
    Run { config_file: PathBuf },
    /// θ sweeps of the repeated single-qubit phase payload.
    TraceSweep,
    /// Visibility decay with circuit depth and exponential fits.
    Visibility,
    /// Jones-polynomial estimates of braid closures.
    Knots,
    /// Exact Jones values.
    Oracle,
    /// Regenerate plots and report.md from bundle CSVs; with several
    /// bundles, draw an overlay of their Jones estimates.
    Report {
        #[arg(required = true)]
        bundles: Vec<PathBuf>,
    },
    /// Print the built-in preset config of a suite.
    Preset { suite: Suite },
}

fn parse_now(s: &str) -> Result<Timestamp> {
    if let Ok(t) = chrono::DateTime::parse_from_rfc3339(s) {
        return Ok(t.to_utc());
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map(|d| Utc.from_utc_datetime(&d.and_hms_opt(0, 0, 0).expect("midnight")))
        .map_err(|_| Error::Config(format!("--now: {s:?} is neither RFC 3339 nor YYYY-MM-DD")))
}

fn build_config(cli: &Cli, suite: Option<Suite>, file: Option<&Path>) -> Result<ExperimentConfig> {
    let mut cfg = match file.or(cli.config.as_deref()) {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::preset(suite.expect("run always has a file")),
    };
    if let Some(s) = suite {
        if cfg.suite != s {
            return Err(Error::Config(format!(
                "suite: config selects {} but the subcommand is {}",
                cfg.suite.name(),
                s.name()
            )));
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if cli.infinite_shots {
        cfg.shots = 0;
    }
    if let Some(now) = &cli.now {
        cfg.now = Some(parse_now(now)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    let suite = match &cli.command {
        Command::Run { config_file } => {
            let cfg = build_config(&cli, None, Some(config_file))?;
            return print_bundle(&run(&cfg, cli.dump_circuit)?);
        }
        Command::TraceSweep => Suite::TraceSweep,
        Command::Visibility => Suite::Visibility,
        Command::Knots => Suite::Knots,
        Command::Oracle => Suite::Oracle,
        Command::Preset { suite } => {
            print!("{}", ExperimentConfig::preset(*suite).to_json());
            return Ok(());
        }
        Command::Report { bundles } => {
            let files = if bundles.len() == 1 {
                report::report(&bundles[0])?
            } else {
                let out = cli.out.clone().unwrap_or_else(|| bundles[0].join("overlay"));
                report::overlay(bundles, &out)?
            };
            for f in files {
                println!("{}", f.display());
            }
            return Ok(());
        }
    };
    let cfg = build_config(&cli, Some(suite), None)?;
    print_bundle(&run(&cfg, cli.dump_circuit)?)
}

fn print_bundle(b: &ResultBundle) -> Result<()> {
    println!("bundle: {}", b.dir.display());
    for p in b.csv.iter().chain(std::iter::once(&b.summary)).chain(&b.svg) {
        println!("  {}", p.display());
    }
    println!("wall clock: {:.2} s", b.wall_clock_secs);
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn now_parsing() {
        assert_eq!(
            data::format_time(parse_now("2019-03-01").unwrap()),
            "2019-03-01T00:00:00Z"
        );
        assert_eq!(
            data::format_time(parse_now("2019-03-01T12:30:00+01:00").unwrap()),
            "2019-03-01T11:30:00Z"
        );
        assert!(parse_now("March").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
