//! θ-sweep benchmark: visibility decay with circuit depth and coherent-error
//! signatures.
//!
//! The payload is `U_N^{(l)}(θ) = U_N(θ) (U_N(θ)† U_N(θ))^{l−1}` with
//! `U_1(θ) = diag(e^{−iθ/2}, e^{iθ/2})` and `U_N = U_1^{⊗N}`. Ideally its
//! normalized trace is `cos^N(θ/2)` for every `l`, so any drop of the peak
//! `⟨σx⟩` with `l` measures accumulated gate error.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{compile_controlled_2x2, Circuit};
use crate::dqc1::{estimate_normalized_trace, PrepStrategy};
use crate::noise::{NoiseModel, ShotEstimate, Timestamp};
use crate::qstate::ComplexMatrix;
use crate::seed;
use crate::{Error, Result};

pub const DEFAULT_GRID: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub sx: ShotEstimate,
    pub sy: ShotEstimate,
    pub sz: ShotEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub n_mixed: usize,
    pub l: usize,
    pub cnots: usize,
    pub seed: u64,
    pub timestamp: Timestamp,
    pub points: Vec<SweepPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    /// Decay constant in CNOTs; non-positive or infinite when the data do
    /// not decay.
    pub tau: f64,
    pub r_squared: f64,
    pub used: usize,
    /// Points with non-positive visibility left out of the log fit.
    pub dropped: usize,
    pub decaying: bool,
}

/// Everything that selects one sweep besides the noise model and clock.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub n_mixed: usize,
    pub l: usize,
    pub grid: usize,
    pub shots: u64,
    pub seed: u64,
    pub prep: PrepStrategy,
}

pub fn u1(theta: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[
        Complex64::from_polar(1.0, -theta / 2.0),
        Complex64::from_polar(1.0, theta / 2.0),
    ])
}

/// `grid` uniform angles from 0 to 2π inclusive.
pub fn theta_grid(grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::Parameter(format!("grid needs at least 2 points, got {grid}")));
    }
    Ok((0..grid).map(|i| 2.0 * PI * i as f64 / (grid - 1) as f64).collect())
}

/// CNOTs in each compiled controlled `U_1` factor, fixed so that every grid
/// point runs the same circuit shape.
pub const FACTOR_CNOTS: usize = 2;

/// Controlled `U_N^{(l)}(θ)`, compiled factor by factor and mixed qubit by
/// mixed qubit.
pub fn sweep_payload(n_mixed: usize, l: usize, theta: f64) -> Result<Circuit> {
    if n_mixed == 0 {
        return Err(Error::Parameter("n_mixed must be at least 1".into()));
    }
    let mut payload = Circuit::new(n_mixed + 1, format!("U{n_mixed}^({l})({theta:.6})"));
    if l == 0 {
        return Ok(payload);
    }
    let fwd = compile_controlled_2x2(&u1(theta), Some(FACTOR_CNOTS))?;
    let back = compile_controlled_2x2(&u1(theta).adjoint(), Some(FACTOR_CNOTS))?;
    let place = |block: &Circuit, j: usize| block.remap(&[0, j], n_mixed + 1);
    for step in 0..2 * l - 1 {
        let block = if step % 2 == 0 { &fwd } else { &back };
        for j in 1..=n_mixed {
            payload.append(&place(block, j)?)?;
        }
    }
    Ok(payload)
}

pub fn theta_sweep(
    n_mixed: usize,
    l: usize,
    grid: usize,
    model: &NoiseModel,
    shots: u64,
    seed: u64,
    now: Timestamp,
) -> Result<SweepCurve> {
    let spec = SweepSpec {
        n_mixed,
        l,
        grid,
        shots,
        seed,
        prep: PrepStrategy::DirectMixed,
    };
    theta_sweep_with(&spec, model, now)
}

pub fn theta_sweep_with(spec: &SweepSpec, model: &NoiseModel, now: Timestamp) -> Result<SweepCurve> {
    let thetas = theta_grid(spec.grid)?;
    let points = thetas
        .par_iter()
        .enumerate()
        .map(|(i, &theta)| {
            let payload = sweep_payload(spec.n_mixed, spec.l, theta)?;
            let s = seed::derive(spec.seed, &[spec.n_mixed as u64, spec.l as u64, i as u64]);
            let est = estimate_normalized_trace(&payload, spec.n_mixed, spec.prep, model, spec.shots, s, now)?;
            Ok(SweepPoint {
                theta,
                sx: est.re,
                sy: est.im,
                sz: est.z_diag,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve {
        n_mixed: spec.n_mixed,
        l: spec.l,
        cnots: sweep_payload(spec.n_mixed, spec.l, 0.0)?.cnot_count(),
        seed: spec.seed,
        timestamp: now,
        points,
    })
}

/// One sweep per repetition count, in the order given.
pub fn visibility_decay(spec: &SweepSpec, ls: &[usize], model: &NoiseModel, now: Timestamp) -> Result<Vec<SweepCurve>> {
    ls.par_iter()
        .map(|&l| theta_sweep_with(&SweepSpec { l, ..spec.clone() }, model, now))
        .collect()
}

/// Peak `⟨σx⟩` over the grid; NaN for an empty curve.
pub fn visibility(curve: &SweepCurve) -> f64 {
    curve
        .points
        .iter()
        .map(|p| p.sx.mean)
        .reduce(f64::max)
        .unwrap_or(f64::NAN)
}

/// Largest `|⟨σy⟩|` over the grid; NaN for an empty curve.
pub fn coherent_error_metric(curve: &SweepCurve) -> f64 {
    curve
        .points
        .iter()
        .map(|p| p.sy.mean.abs())
        .reduce(f64::max)
        .unwrap_or(f64::NAN)
}

/// `(cnots, visibility)` for each curve.
pub fn visibility_series(curves: &[SweepCurve]) -> Vec<(f64, f64)> {
    curves.iter().map(|c| (c.cnots as f64, visibility(c))).collect()
}

/// Pointwise mean of curves sharing `θ` grid and CNOT count.
pub fn average_curves(curves: &[SweepCurve]) -> Result<SweepCurve> {
    let first = curves
        .first()
        .ok_or_else(|| Error::Parameter("no curves to average".into()))?;
    for c in curves {
        let same_grid =
            c.points.len() == first.points.len() && c.points.iter().zip(&first.points).all(|(p, q)| p.theta == q.theta);
        if !same_grid || c.cnots != first.cnots {
            return Err(Error::Parameter("curves differ in θ grid or CNOT count".into()));
        }
    }
    let m = curves.len() as f64;
    let mean = |f: &dyn Fn(&SweepPoint) -> ShotEstimate, i: usize| {
        let ests: Vec<ShotEstimate> = curves.iter().map(|c| f(&c.points[i])).collect();
        ShotEstimate {
            mean: ests.iter().map(|e| e.mean).sum::<f64>() / m,
            stderr: ests.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt() / m,
            shots: ests.iter().map(|e| e.shots).sum(),
        }
    };
    let points = (0..first.points.len())
        .map(|i| SweepPoint {
            theta: first.points[i].theta,
            sx: mean(&|p| p.sx, i),
            sy: mean(&|p| p.sy, i),
            sz: mean(&|p| p.sz, i),
        })
        .collect();
    Ok(SweepCurve {
        points,
        ..first.clone()
    })
}

/// Fits `y = a e^{−x/τ}` by least squares on `ln y`.
///
/// R² is evaluated on the original `y` values. Points with `y ≤ 0` are
/// dropped and counted in [`FitResult::dropped`].
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<FitResult> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(_, y)| y > 0.0 && y.is_finite())
        .collect();
    if usable.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 positive points, got {} of {}",
            usable.len(),
            points.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all x values are equal".into()));
    }
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let a = (my - slope * mx).exp();
    let tau = -1.0 / slope;
    let ybar = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let ss_res: f64 = usable.iter().map(|&(x, y)| (y - a * (slope * x).exp()).powi(2)).sum();
    let ss_tot: f64 = usable.iter().map(|&(_, y)| (y - ybar).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        f64::NEG_INFINITY
    };
    Ok(FitResult {
        a,
        tau,
        r_squared,
        used: usable.len(),
        dropped: points.len() - usable.len(),
        decaying: slope < 0.0,
    })
}
