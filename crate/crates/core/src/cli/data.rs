//! CSV row layouts and their conversion to and from library results.

use std::path::Path;

use chrono::SecondsFormat;
use num_complex::Complex64;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::bench::{SweepCurve, SweepPoint};
use crate::knots::{sample_stats, BraidWord, JonesEstimate, WrithePhase};
use crate::noise::{ShotEstimate, Timestamp};
use crate::{Error, Result};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const KNOTS_CSV: &str = "knots.csv";
pub const ORACLE_CSV: &str = "oracle.csv";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_mixed: usize,
    pub l: usize,
    pub cnots: usize,
    pub theta: f64,
    pub sx_mean: f64,
    pub sx_err: f64,
    pub sy_mean: f64,
    pub sy_err: f64,
    pub sz_mean: f64,
    pub sz_err: f64,
    pub seed: u64,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotRow {
    pub word: String,
    pub k: usize,
    pub writhe: i64,
    pub cnots_upper: usize,
    pub cnots_lower: usize,
    pub trial: usize,
    pub re: f64,
    pub im: f64,
    pub seed: u64,
    pub qubit_pair: String,
    pub timestamp: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub word: String,
    pub k: usize,
    pub writhe: i64,
    pub re: f64,
    pub im: f64,
}

pub fn format_time(t: Timestamp) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn parse_time(s: &str, path: &Path) -> Result<Timestamp> {
    chrono::DateTime::parse_from_rfc3339(s)
        .map(|t| t.to_utc())
        .map_err(|e| Error::Data {
            path: path.display().to_string(),
            msg: format!("bad timestamp {s:?}: {e}"),
        })
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        Error::Data {
            path: path.display().to_string(),
            msg: e.to_string(),
        }
    }
}

pub fn sweep_rows(curves: &[SweepCurve]) -> Vec<SweepRow> {
    curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |p| SweepRow {
                n_mixed: c.n_mixed,
                l: c.l,
                cnots: c.cnots,
                theta: p.theta,
                sx_mean: p.sx.mean,
                sx_err: p.sx.stderr,
                sy_mean: p.sy.mean,
                sy_err: p.sy.stderr,
                sz_mean: p.sz.mean,
                sz_err: p.sz.stderr,
                seed: c.seed,
                timestamp: format_time(c.timestamp),
            })
        })
        .collect()
}

/// Regroups rows into curves by `(n_mixed, l)`, in order of appearance.
pub fn curves_from_rows(rows: &[SweepRow], path: &Path) -> Result<Vec<SweepCurve>> {
    let mut curves: Vec<SweepCurve> = Vec::new();
    for r in rows {
        let est = |mean: f64, stderr: f64| ShotEstimate { mean, stderr, shots: 0 };
        let point = SweepPoint {
            theta: r.theta,
            sx: est(r.sx_mean, r.sx_err),
            sy: est(r.sy_mean, r.sy_err),
            sz: est(r.sz_mean, r.sz_err),
        };
        match curves.iter_mut().find(|c| c.n_mixed == r.n_mixed && c.l == r.l) {
            Some(c) => c.points.push(point),
            None => curves.push(SweepCurve {
                n_mixed: r.n_mixed,
                l: r.l,
                cnots: r.cnots,
                seed: r.seed,
                timestamp: parse_time(&r.timestamp, path)?,
                points: vec![point],
            }),
        }
    }
    Ok(curves)
}

pub fn knot_rows(estimates: &[JonesEstimate]) -> Vec<KnotRow> {
    estimates
        .iter()
        .flat_map(|e| {
            e.samples
                .iter()
                .zip(&e.trial_seeds)
                .enumerate()
                .map(move |(t, (v, &seed))| KnotRow {
                    word: e.word.to_string(),
                    k: e.word.len(),
                    writhe: e.writhe,
                    cnots_upper: e.cnots_upper,
                    cnots_lower: e.cnots_lower,
                    trial: t,
                    re: v.re,
                    im: v.im,
                    seed,
                    qubit_pair: e.qubit_pair.clone(),
                    timestamp: format_time(e.timestamp),
                })
        })
        .collect()
}

/// Rebuilds estimates from trial rows. A run of rows with the same pair and
/// word starting at trial 0 forms one estimate, so a word listed twice
/// stays two estimates. Shot counts are not stored and come back as 0.
pub fn estimates_from_rows(rows: &[KnotRow], path: &Path) -> Result<Vec<JonesEstimate>> {
    let mut out: Vec<JonesEstimate> = Vec::new();
    for r in rows {
        let v = Complex64::new(r.re, r.im);
        let current = out
            .last_mut()
            .filter(|e| r.trial != 0 && e.qubit_pair == r.qubit_pair && e.word.to_string() == r.word);
        match current {
            Some(e) => {
                e.samples.push(v);
                e.trial_seeds.push(r.seed);
            }
            None => {
                let word: BraidWord = r.word.parse().map_err(|e: Error| Error::Data {
                    path: path.display().to_string(),
                    msg: e.to_string(),
                })?;
                out.push(JonesEstimate {
                    word,
                    writhe: r.writhe,
                    value: v,
                    trials: 0,
                    shots_per_trial: 0,
                    mean: v,
                    cov: [[0.0; 2]; 2],
                    cnots_upper: r.cnots_upper,
                    cnots_lower: r.cnots_lower,
                    qubit_pair: r.qubit_pair.clone(),
                    timestamp: parse_time(&r.timestamp, path)?,
                    samples: vec![v],
                    trial_seeds: vec![r.seed],
                });
            }
        }
    }
    for e in &mut out {
        let (mean, cov) = sample_stats(&e.samples);
        e.mean = mean;
        e.value = mean;
        e.cov = cov;
        e.trials = e.samples.len();
    }
    Ok(out)
}

pub fn oracle_rows(words: &[BraidWord], phase: WrithePhase) -> Vec<OracleRow> {
    words
        .iter()
        .map(|w| {
            let v = crate::knots::jones_oracle_with(w, phase);
            OracleRow {
                word: w.to_string(),
                k: w.len(),
                writhe: crate::knots::writhe(w),
                re: v.re,
                im: v.im,
            }
        })
        .collect()
}
