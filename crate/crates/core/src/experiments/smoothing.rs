//! One-sided exponential gain of the integrating-factor field
//! `𝔴̂(t,k) = exp(−i(k²t + k∫₀ᵗ Re P₀F_β)) Ŵ(t,k)`.
//!
//! To leading order `|𝔴̂(t,k)| ≈ |𝔴̂(0,k)| exp(−εk²t − k∫₀ᵗ Im P₀F_β)`, so when
//! `Im P₀F_β > 0` the modes `k < 0` grow and the modes `k > 0` decay. The
//! probe measures this mechanism; the non-existence statement it underlies is
//! not observable at finite resolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, Criterion, ExperimentReport, FitKind, Series, Verdict};
use super::{describe_nonlinearity, ExperimentError};
use crate::classifier::{decide, Status};
use crate::gauge::gauge_forward_at;
use crate::nonlin_poly::ComplexPolynomial4;
use crate::solver::{evolve, SolverConfig};
use crate::spectral::{dyadic_modes, GridFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub n: usize,
    pub eps: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    /// Admissible pairs satisfy `εk²t < viscous_window`.
    pub viscous_window: f64,
    pub proportionality_tolerance: f64,
    pub asymmetry_threshold: f64,
    pub seed: u64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            n: 1024,
            eps: 1e-3,
            dt: 1e-4,
            t_end: 0.01,
            snapshot_stride: 5,
            viscous_window: 0.2,
            proportionality_tolerance: 0.25,
            asymmetry_threshold: 4.0,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeGain {
    /// Wavenumber on the predicted (growing) side.
    pub k: i64,
    pub times: Vec<f64>,
    /// Viscosity-corrected `log|𝔴̂(t,k)/𝔴̂(0,k)|` at `k` and at `−k`.
    pub measured: Vec<f64>,
    pub mirrored: Vec<f64>,
    /// `−k ∫₀ᵗ Im P₀F_β`.
    pub predicted: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingMeasurements {
    pub im_p0_initial: f64,
    /// `−1` if the band `k < 0` is predicted to grow, `+1` otherwise.
    pub predicted_side: i64,
    pub times: Vec<f64>,
    pub p0_fbeta: Vec<[f64; 2]>,
    pub int_re: Vec<f64>,
    pub int_im: Vec<f64>,
    pub modes: Vec<ModeGain>,
    /// Least-squares slope of measured against predicted gain, through the origin.
    pub proportionality: f64,
    /// Geometric mean over the band of growth(predicted side)/growth(mirrored side)
    /// at the last admissible time of each mode.
    pub asymmetry_ratio: f64,
    pub overflowed: bool,
}

fn cumulative_trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for i in 1..t.len() {
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    }
    out
}

/// Run the probe without classification preconditions (used for controls).
pub fn smoothing_diagnostics(
    f: &ComplexPolynomial4,
    phi: &GridFunction,
    p: &SmoothingParams,
) -> Result<SmoothingMeasurements, ExperimentError> {
    if !(p.eps > 0.0) {
        return Err(ExperimentError::Precondition("viscosity must be positive".into()));
    }
    let cfg = SolverConfig { n: p.n, eps: p.eps, dt: p.dt, t_end: p.t_end, snapshot_stride: p.snapshot_stride, seed: p.seed };
    let traj = evolve(f, phi, &cfg)?;
    let states = traj
        .snapshots
        .iter()
        .zip(&traj.times)
        .map(|(u, &t)| gauge_forward_at(f, u, t))
        .collect::<Result<Vec<_>, _>>()?;
    let times = traj.times.clone();
    let re: Vec<f64> = states.iter().map(|s| s.p0_fbeta.re).collect();
    let im: Vec<f64> = states.iter().map(|s| s.p0_fbeta.im).collect();
    let int_re = cumulative_trapezoid(&times, &re);
    let int_im = cumulative_trapezoid(&times, &im);
    let im0 = im[0];
    let side = if im0 < 0.0 { 1 } else { -1 };

    let frak = |j: usize, k: i64| -> Complex64 {
        let kf = k as f64;
        let phase = Complex64::new(0.0, -(kf * kf * times[j] + kf * int_re[j])).exp();
        phase * states[j].w_gauged.coeff(k)
    };
    let gain = |j: usize, k: i64| -> f64 {
        let kf = k as f64;
        (frak(j, k).norm() / frak(0, k).norm()).ln() + p.eps * kf * kf * times[j]
    };

    let band: Vec<i64> = dyadic_modes(p.n).into_iter().filter(|&k| k >= 8 && k as usize <= p.n / 8).collect();
    let mut modes = Vec::new();
    for &kabs in &band {
        let k = side * kabs;
        let mut g = ModeGain { k, times: Vec::new(), measured: Vec::new(), mirrored: Vec::new(), predicted: Vec::new() };
        for j in 1..times.len() {
            if p.eps * (kabs * kabs) as f64 * times[j] >= p.viscous_window {
                break;
            }
            g.times.push(times[j]);
            g.measured.push(gain(j, k));
            g.mirrored.push(gain(j, -k));
            g.predicted.push(-(k as f64) * int_im[j]);
        }
        if !g.times.is_empty() {
            modes.push(g);
        }
    }
    let xs: Vec<f64> = modes.iter().flat_map(|m| m.predicted.iter().copied()).collect();
    let ys: Vec<f64> = modes.iter().flat_map(|m| m.measured.iter().copied()).collect();
    let proportionality = if xs.is_empty() { f64::NAN } else { super::fit::fit_through_origin(&xs, &ys) };
    let diffs: Vec<f64> = modes
        .iter()
        .map(|m| m.measured.last().expect("nonempty") - m.mirrored.last().expect("nonempty"))
        .collect();
    let asymmetry_ratio = if diffs.is_empty() {
        f64::NAN
    } else {
        (diffs.iter().sum::<f64>() / diffs.len() as f64).exp()
    };
    Ok(SmoothingMeasurements {
        im_p0_initial: im0,
        predicted_side: side,
        times,
        p0_fbeta: re.iter().zip(&im).map(|(a, b)| [*a, *b]).collect(),
        int_re,
        int_im,
        modes,
        proportionality,
        asymmetry_ratio,
        overflowed: traj.overflowed(),
    })
}

pub fn smoothing_probe(
    f: &ComplexPolynomial4,
    phi: &GridFunction,
    p: &SmoothingParams,
) -> Result<ExperimentReport, ExperimentError> {
    if decide(f)?.status != Status::IllPosed {
        return Err(ExperimentError::Precondition("nonlinearity is not ill-posed".into()));
    }
    let m = smoothing_diagnostics(f, phi, p)?;
    let mut report = ExperimentReport::new(
        "smooth-probe",
        serde_json::json!({ "nonlinearity": describe_nonlinearity(f), "params": p }),
        p.seed,
    );
    report.notes.push(
        "measures the one-sided integrating-factor gain; the non-existence statement itself is not observable numerically"
            .into(),
    );
    report.notes.push(format!("Im P0 F_beta at t = 0: {:e}", m.im_p0_initial));
    report.series.push(Series::new(
        "p0_fbeta_im",
        "t",
        "Im P0 F_beta",
        m.times.clone(),
        m.p0_fbeta.iter().map(|c| c[1]).collect(),
    ));
    for g in &m.modes {
        report.series.push(Series::new(&format!("gain_k{}", g.k), "t", "measured gain", g.times.clone(), g.measured.clone()));
        report.series.push(Series::new(&format!("gain_k{}", -g.k), "t", "measured gain", g.times.clone(), g.mirrored.clone()));
    }
    let xs: Vec<f64> = m.modes.iter().flat_map(|g| g.predicted.iter().copied()).collect();
    let ys: Vec<f64> = m.modes.iter().flat_map(|g| g.measured.iter().copied()).collect();
    report.series.push(Series::new("gain_vs_predicted", "predicted gain", "measured gain", xs.clone(), ys));

    if m.im_p0_initial.abs() < 1e-12 {
        report.notes.push("Im P0 F_beta vanishes at the initial data; no one-sided prediction".into());
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    if m.overflowed || xs.is_empty() {
        report.notes.push("overflow or empty admissible (k, t) window; inconclusive".into());
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    report.add_fit("proportionality", "gain_vs_predicted", FitKind::ThroughOrigin);
    report.add_criterion(Criterion::new(
        "proportionality",
        m.proportionality,
        Comparison::Within { target: 1.0, tolerance: p.proportionality_tolerance },
    ));
    report.add_criterion(Criterion::new(
        "asymmetry_ratio",
        m.asymmetry_ratio,
        Comparison::Gt { threshold: p.asymmetry_threshold },
    ));
    report.finalize();
    Ok(report)
}
