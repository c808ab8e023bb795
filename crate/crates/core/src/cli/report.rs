//! Summaries, tables and plots regenerated from a bundle's CSV files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::data::{self, KnotRow, OracleRow, SweepRow, KNOTS_CSV, ORACLE_CSV, SWEEP_CSV};
use super::svg::{color, render, Chart, Ellipse, Series, Style, GRAY};
use crate::bench::{coherent_error_metric, fit_exponential, visibility, FitResult, SweepCurve};
use crate::knots::{jones_oracle_with, knot_distance, BraidWord, JonesEstimate, WrithePhase};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct CurveSummary {
    pub n_mixed: usize,
    pub l: usize,
    pub cnots: usize,
    pub visibility: f64,
    pub coherent_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub n_mixed: usize,
    pub fit: Option<FitResult>,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateSummary {
    pub word: String,
    pub qubit_pair: String,
    pub k: usize,
    pub writhe: i64,
    pub trials: usize,
    pub cnots_upper: usize,
    pub cnots_lower: usize,
    pub mean: Complex64,
    pub cov: [[f64; 2]; 2],
    pub oracle: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceSummary {
    pub a: String,
    pub b: String,
    pub qubit_pair: String,
    pub dist: f64,
    pub err: f64,
    pub oracle_dist: f64,
    /// Distance divided by the exact one; absent when the exact distance is 0.
    pub normalized: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Analysis {
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<DecayFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimateSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub distances: Vec<DistanceSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Data loaded from one bundle directory.
#[derive(Clone, Debug, Default)]
pub struct BundleData {
    pub dir: PathBuf,
    pub curves: Vec<SweepCurve>,
    pub estimates: Vec<JonesEstimate>,
    pub oracle: Vec<OracleRow>,
    pub phase: WrithePhase,
    pub compare: Vec<(BraidWord, BraidWord)>,
}

impl BundleData {
    pub fn load(dir: &Path) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "bundle directory not found"),
            ));
        }
        let cfg_path = dir.join(super::CONFIG_JSON);
        let cfg = if cfg_path.exists() {
            Some(ExperimentConfig::load(&cfg_path).map_err(|e| match e {
                Error::Config(msg) => Error::Data {
                    path: cfg_path.display().to_string(),
                    msg,
                },
                other => other,
            })?)
        } else {
            None
        };
        let mut out = Self {
            dir: dir.to_path_buf(),
            phase: cfg.as_ref().map(|c| c.phase).unwrap_or_default(),
            compare: cfg
                .map(|c| c.compare)
                .unwrap_or_else(crate::knots::distinguishing_pairs),
            ..Self::default()
        };
        let mut found = false;
        let p = dir.join(SWEEP_CSV);
        if p.exists() {
            out.curves = data::curves_from_rows(&data::read_rows::<SweepRow>(&p)?, &p)?;
            found = true;
        }
        let p = dir.join(KNOTS_CSV);
        if p.exists() {
            out.estimates = data::estimates_from_rows(&data::read_rows::<KnotRow>(&p)?, &p)?;
            found = true;
        }
        let p = dir.join(ORACLE_CSV);
        if p.exists() {
            out.oracle = data::read_rows(&p)?;
            found = true;
        }
        if !found {
            return Err(Error::Data {
                path: dir.display().to_string(),
                msg: format!("no {SWEEP_CSV}, {KNOTS_CSV} or {ORACLE_CSV} found"),
            });
        }
        Ok(out)
    }

    pub fn analyze(&self) -> Analysis {
        let mut a = Analysis {
            oracle: self.oracle.clone(),
            ..Analysis::default()
        };
        for c in &self.curves {
            a.curves.push(CurveSummary {
                n_mixed: c.n_mixed,
                l: c.l,
                cnots: c.cnots,
                visibility: visibility(c),
                coherent_error: coherent_error_metric(c),
            });
        }
        let mut sizes: Vec<usize> = self.curves.iter().map(|c| c.n_mixed).collect();
        sizes.dedup();
        for n in sizes {
            let points: Vec<(f64, f64)> = a
                .curves
                .iter()
                .filter(|c| c.n_mixed == n)
                .map(|c| (c.cnots as f64, c.visibility))
                .collect();
            let fit = match fit_exponential(&points) {
                Ok(f) => {
                    if f.dropped > 0 {
                        a.warnings.push(format!(
                            "n_mixed={n}: dropped {} non-positive visibilities before the fit",
                            f.dropped
                        ));
                    }
                    if !f.decaying {
                        a.warnings
                            .push(format!("n_mixed={n}: visibility does not decay (tau = {})", f.tau));
                    }
                    Some(f)
                }
                Err(e) => {
                    a.warnings.push(format!("n_mixed={n}: {e}"));
                    None
                }
            };
            a.fits.push(DecayFit {
                n_mixed: n,
                fit,
                points,
            });
        }
        for e in &self.estimates {
            a.estimates.push(EstimateSummary {
                word: e.word.to_string(),
                qubit_pair: e.qubit_pair.clone(),
                k: e.word.len(),
                writhe: e.writhe,
                trials: e.trials,
                cnots_upper: e.cnots_upper,
                cnots_lower: e.cnots_lower,
                mean: e.mean,
                cov: e.cov,
                oracle: jones_oracle_with(&e.word, self.phase),
            });
        }
        for (wa, wb) in &self.compare {
            let pairs: Vec<&String> = {
                let mut v: Vec<&String> = self.estimates.iter().map(|e| &e.qubit_pair).collect();
                v.dedup();
                v
            };
            for pair in pairs {
                let find = |w: &BraidWord| self.estimates.iter().find(|e| &e.qubit_pair == pair && &e.word == w);
                let (Some(ea), Some(eb)) = (find(wa), find(wb)) else {
                    continue;
                };
                let oracle_dist = (jones_oracle_with(wa, self.phase) - jones_oracle_with(wb, self.phase)).norm();
                let (dist, err) = knot_distance(ea, eb, false, None).expect("raw distance");
                a.distances.push(DistanceSummary {
                    a: wa.to_string(),
                    b: wb.to_string(),
                    qubit_pair: pair.clone(),
                    dist,
                    err,
                    oracle_dist,
                    normalized: knot_distance(ea, eb, true, Some(oracle_dist)).ok(),
                });
            }
        }
        a
    }
}

/// Writes plots and `report.md` for one bundle; returns the files written.
pub fn report(dir: &Path) -> Result<Vec<PathBuf>> {
    let data = BundleData::load(dir)?;
    let analysis = data.analyze();
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let p = dir.join(name);
        std::fs::write(&p, body).map_err(|e| Error::io(&p, e))?;
        written.push(p);
        Ok(())
    };
    let mut sizes: Vec<usize> = data.curves.iter().map(|c| c.n_mixed).collect();
    sizes.dedup();
    for &n in &sizes {
        put(&format!("sweep_n{n}.svg"), sweep_svg(&data.curves, n))?;
    }
    if !analysis.fits.is_empty() {
        put("visibility.svg", visibility_svg(&analysis))?;
    }
    if !data.estimates.is_empty() {
        put("knots.svg", knots_svg(&data.estimates, data.phase, None))?;
        if !analysis.distances.is_empty() {
            put("distances.svg", distances_svg(&analysis))?;
        }
    }
    if !data.oracle.is_empty() {
        put("oracle.svg", oracle_svg(&data.oracle))?;
    }
    put("report.md", markdown(&analysis))?;
    Ok(written)
}

/// Overlays the Jones estimates of several bundles, e.g. runs on different
/// dates, into `out_dir`.
pub fn overlay(dirs: &[PathBuf], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let bundles: Vec<BundleData> = dirs.iter().map(|d| BundleData::load(d)).collect::<Result<_>>()?;
    if bundles.iter().any(|b| b.estimates.is_empty()) {
        return Err(Error::Data {
            path: dirs
                .iter()
                .map(|d| d.display().to_string())
                .collect::<Vec<_>>()
                .join(", "),
            msg: "overlay needs a knots CSV in every bundle".into(),
        });
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let sets: Vec<(String, &[JonesEstimate])> = bundles
        .iter()
        .map(|b| {
            let stamp = b
                .estimates
                .first()
                .map(|e| data::format_time(e.timestamp))
                .unwrap_or_default();
            (format!("{} ({stamp})", b.dir.display()), b.estimates.as_slice())
        })
        .collect();
    let svg = knots_svg(&[], bundles[0].phase, Some(&sets));
    let svg_path = out_dir.join("overlay.svg");
    std::fs::write(&svg_path, svg).map_err(|e| Error::io(&svg_path, e))?;
    let mut md = String::from(
        "# Jones estimates across bundles\n\n| bundle | pair | word | mean | oracle |\n|---|---|---|---|---|\n",
    );
    for b in &bundles {
        for e in b.analyze().estimates {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} |",
                b.dir.display(),
                e.qubit_pair,
                e.word,
                cfmt(e.mean),
                cfmt(e.oracle)
            );
        }
    }
    let md_path = out_dir.join("overlay.md");
    std::fs::write(&md_path, md).map_err(|e| Error::io(&md_path, e))?;
    Ok(vec![svg_path, md_path])
}

fn sweep_svg(curves: &[SweepCurve], n: usize) -> String {
    let panels = [("⟨σx⟩", 0usize), ("⟨σy⟩", 1), ("⟨σz⟩", 2)];
    let charts: Vec<Chart> = panels
        .iter()
        .map(|&(label, axis)| {
            let mut ch = Chart::new(format!("N = {n}: {label}"), "θ (rad)", label);
            for (i, c) in curves.iter().filter(|c| c.n_mixed == n).enumerate() {
                let pick = |p: &crate::bench::SweepPoint| match axis {
                    0 => p.sx,
                    1 => p.sy,
                    _ => p.sz,
                };
                let pts = c.points.iter().map(|p| (p.theta, pick(p).mean)).collect();
                let errs = c.points.iter().map(|p| pick(p).stderr).collect();
                ch.series.push(
                    Series::new(format!("{} CNOTs", c.cnots), color(i), Style::LineMarkers, pts).with_errors(errs),
                );
            }
            ch
        })
        .collect();
    render(&charts)
}

fn visibility_svg(a: &Analysis) -> String {
    let mut ch = Chart::new("Visibility decay", "CNOT count", "visibility");
    for (i, f) in a.fits.iter().enumerate() {
        ch.series.push(Series::new(
            format!("N = {}", f.n_mixed),
            color(i),
            Style::Markers,
            f.points.clone(),
        ));
        if let Some(fit) = f.fit {
            let xmax = f.points.iter().map(|p| p.0).fold(0.0, f64::max);
            let curve = (0..=50)
                .map(|j| {
                    let x = xmax * j as f64 / 50.0;
                    (x, fit.a * (-x / fit.tau).exp())
                })
                .collect();
            ch.series.push(Series::new(
                format!("fit τ = {:.2}, R² = {:.3}", fit.tau, fit.r_squared),
                color(i),
                Style::Line,
                curve,
            ));
        }
    }
    render(&[ch])
}

fn knots_svg(estimates: &[JonesEstimate], phase: WrithePhase, sets: Option<&[(String, &[JonesEstimate])]>) -> String {
    let own = [(String::new(), estimates)];
    let sets = sets.unwrap_or(&own);
    let mut pairs: Vec<&str> = Vec::new();
    for (_, ests) in sets {
        for e in ests.iter() {
            if !pairs.contains(&e.qubit_pair.as_str()) {
                pairs.push(&e.qubit_pair);
            }
        }
    }
    let charts: Vec<Chart> = pairs
        .iter()
        .map(|pair| {
            let mut ch = Chart::new(format!("Jones estimates, {pair}"), "Re V", "Im V");
            ch.square = true;
            let mut words: Vec<&BraidWord> = Vec::new();
            for (si, (name, ests)) in sets.iter().enumerate() {
                let mine: Vec<&JonesEstimate> = ests.iter().filter(|e| e.qubit_pair == *pair).collect();
                // Colour by bundle in overlays, by leading generator otherwise.
                let mut groups: Vec<(String, String, Vec<&JonesEstimate>)> = Vec::new();
                for e in mine {
                    let key = if sets.len() > 1 {
                        name.clone()
                    } else {
                        e.word
                            .generators
                            .last()
                            .map_or("id".to_string(), |g| g.name().to_string())
                    };
                    match groups.iter_mut().find(|g| g.0 == key) {
                        Some(g) => g.2.push(e),
                        None => {
                            let c = if sets.len() > 1 { color(si) } else { color(groups.len()) };
                            groups.push((key, c.to_string(), vec![e]));
                        }
                    }
                    if !words.contains(&&e.word) {
                        words.push(&e.word);
                    }
                }
                for (label, col, es) in groups {
                    ch.series.push(Series::new(
                        label,
                        &col,
                        Style::Markers,
                        es.iter().map(|e| (e.mean.re, e.mean.im)).collect(),
                    ));
                    for e in es {
                        ch.ellipses.push(Ellipse::from_cov(e.mean.re, e.mean.im, e.cov, &col));
                    }
                }
            }
            let oracle = words
                .iter()
                .map(|w| {
                    let v = jones_oracle_with(w, phase);
                    (v.re, v.im)
                })
                .collect();
            ch.series.push(Series::new("exact", GRAY, Style::Markers, oracle));
            ch
        })
        .collect();
    render(&charts)
}

fn distances_svg(a: &Analysis) -> String {
    let mut pairs: Vec<&str> = a.distances.iter().map(|d| d.qubit_pair.as_str()).collect();
    pairs.dedup();
    let charts: Vec<Chart> = pairs
        .iter()
        .map(|pair| {
            let mut ch = Chart::new(format!("Jones distances, {pair}"), "crossings in first word", "|ΔV|");
            let ds: Vec<&DistanceSummary> = a.distances.iter().filter(|d| d.qubit_pair == *pair).collect();
            let x = |d: &DistanceSummary| d.a.parse::<BraidWord>().map_or(0.0, |w| w.len() as f64);
            ch.series.push(
                Series::new(
                    "measured",
                    color(0),
                    Style::Markers,
                    ds.iter().map(|d| (x(d), d.dist)).collect(),
                )
                .with_errors(ds.iter().map(|d| d.err).collect()),
            );
            ch.series.push(Series::new(
                "exact",
                GRAY,
                Style::Markers,
                ds.iter().map(|d| (x(d), d.oracle_dist)).collect(),
            ));
            ch
        })
        .collect();
    render(&charts)
}

fn oracle_svg(rows: &[OracleRow]) -> String {
    let mut ch = Chart::new("Exact Jones values", "Re V", "Im V");
    ch.square = true;
    ch.series.push(Series::new(
        "exact",
        GRAY,
        Style::Markers,
        rows.iter().map(|r| (r.re, r.im)).collect(),
    ));
    render(&[ch])
}

fn cfmt(z: Complex64) -> String {
    format!("{:.4} {} {:.4}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

pub fn markdown(a: &Analysis) -> String {
    let mut md = String::from("# Benchmark report\n");
    if !a.curves.is_empty() {
        md.push_str("\n## Sweeps\n\n| N | l | CNOTs | visibility | max abs(σy) |\n|---|---|---|---|---|\n");
        for c in &a.curves {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {:.4} | {:.4} |",
                c.n_mixed, c.l, c.cnots, c.visibility, c.coherent_error
            );
        }
    }
    if !a.fits.is_empty() {
        md.push_str(
            "\n## Exponential fits\n\n| N | a | τ (CNOTs) | R² | points | dropped |\n|---|---|---|---|---|---|\n",
        );
        for f in &a.fits {
            match &f.fit {
                Some(r) => {
                    let _ = writeln!(
                        md,
                        "| {} | {:.4} | {:.2} | {:.4} | {} | {} |",
                        f.n_mixed, r.a, r.tau, r.r_squared, r.used, r.dropped
                    );
                }
                None => {
                    let _ = writeln!(md, "| {} | - | - | - | {} | - |", f.n_mixed, f.points.len());
                }
            }
        }
    }
    if !a.estimates.is_empty() {
        md.push_str("\n## Jones estimates\n\n| pair | word | writhe | CNOTs (u, l) | trials | mean | sd (re, im) | exact |\n|---|---|---|---|---|---|---|---|\n");
        for e in &a.estimates {
            let _ = writeln!(
                md,
                "| {} | {} | {} | ({}, {}) | {} | {} | ({:.4}, {:.4}) | {} |",
                e.qubit_pair,
                e.word,
                e.writhe,
                e.cnots_upper,
                e.cnots_lower,
                e.trials,
                cfmt(e.mean),
                e.cov[0][0].sqrt(),
                e.cov[1][1].sqrt(),
                cfmt(e.oracle)
            );
        }
    }
    if !a.distances.is_empty() {
        md.push_str(
            "\n## Distances\n\n| pair | words | measured | exact | measured / exact |\n|---|---|---|---|---|\n",
        );
        for d in &a.distances {
            let norm = d
                .normalized
                .map_or("-".to_string(), |(v, e)| format!("{v:.3} ± {e:.3}"));
            let _ = writeln!(
                md,
                "| {} | {} vs {} | {:.3} ± {:.3} | {:.3} | {} |",
                d.qubit_pair, d.a, d.b, d.dist, d.err, d.oracle_dist, norm
            );
        }
    }
    if !a.oracle.is_empty() {
        md.push_str("\n## Exact Jones values\n\n| word | writhe | V |\n|---|---|---|\n");
        for r in &a.oracle {
            let _ = writeln!(
                md,
                "| {} | {} | {} |",
                r.word,
                r.writhe,
                cfmt(Complex64::new(r.re, r.im))
            );
        }
    }
    if !a.warnings.is_empty() {
        md.push_str("\n## Warnings\n\n");
        for w in &a.warnings {
            let _ = writeln!(md, "- {w}");
        }
    }
    md
}
