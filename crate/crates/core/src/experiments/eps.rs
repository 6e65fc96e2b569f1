//! Vanishing-viscosity rate: `sup_t ‖u^{ε₁} − u^{ε₂}‖_{H^{s−1}}` against `|ε₁ − ε₂|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, Criterion, ExperimentReport, FitKind, Series, Verdict};
use super::{describe_nonlinearity, ExperimentError};
use crate::classifier::{decide, Status};
use crate::nonlin_poly::ComplexPolynomial4;
use crate::solver::{evolve, SolverConfig, Trajectory};
use crate::spectral::{japanese, wavenumber, GridFunction};

pub const MIN_VISCOSITIES: usize = 4;
pub const ORDER_THRESHOLD: f64 = 0.45;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsStudyParams {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub s: f64,
    pub eps_list: Vec<f64>,
    pub snapshot_stride: usize,
    pub seed: u64,
}

impl Default for EpsStudyParams {
    fn default() -> Self {
        Self {
            n: 256,
            dt: 1e-3,
            t_end: 0.1,
            s: 2.6,
            eps_list: vec![1e-2, 10f64.powf(-2.5), 1e-3, 10f64.powf(-3.5)],
            snapshot_stride: 1,
            seed: 0,
        }
    }
}

/// `sup_t (Σ ⟨k⟩^{2σ} |e^{−ε₁k²t} − e^{−ε₂k²t}|² |φ̂(k)|²)^{1/2}` over the given times.
pub fn linear_difference_closed_form(phi: &GridFunction, e1: f64, e2: f64, sigma: f64, times: &[f64]) -> f64 {
    let n = phi.n();
    times
        .iter()
        .map(|&t| {
            phi.coeffs()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != n / 2)
                .map(|(i, c)| {
                    let k = wavenumber(i, n) as f64;
                    let d = (-e1 * k * k * t).exp() - (-e2 * k * k * t).exp();
                    japanese(k).powf(2.0 * sigma) * d * d * c.norm_sqr()
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

fn sup_difference(a: &Trajectory, b: &Trajectory, sigma: f64) -> f64 {
    a.snapshots.iter().zip(&b.snapshots).map(|(x, y)| (x - y).sobolev_norm(sigma)).fold(0.0, f64::max)
}

pub fn eps_convergence_study(
    f: &ComplexPolynomial4,
    phi: &GridFunction,
    p: &EpsStudyParams,
) -> Result<ExperimentReport, ExperimentError> {
    if p.eps_list.len() < MIN_VISCOSITIES {
        return Err(ExperimentError::Precondition(format!(
            "need ≥ {MIN_VISCOSITIES} viscosities, got {}",
            p.eps_list.len()
        )));
    }
    if p.eps_list.windows(2).any(|w| w[1] > w[0]) || p.eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(ExperimentError::Precondition("viscosities must be positive and decreasing".into()));
    }
    if decide(f)?.status != Status::WellPosed {
        return Err(ExperimentError::Precondition("nonlinearity is not well-posed".into()));
    }
    let mut report = ExperimentReport::new(
        "eps-converge",
        serde_json::json!({ "nonlinearity": describe_nonlinearity(f), "params": p, "initial_coeffs": phi.coeffs_ascending().iter().filter(|(_, c)| c.norm() > 0.0).map(|(k, c)| (k, [c.re, c.im])).collect::<Vec<_>>() }),
        p.seed,
    );
    let runs: Vec<Result<Trajectory, _>> = p
        .eps_list
        .par_iter()
        .map(|&eps| {
            let cfg = SolverConfig { n: p.n, eps, dt: p.dt, t_end: p.t_end, snapshot_stride: p.snapshot_stride, seed: p.seed };
            evolve(f, phi, &cfg)
        })
        .collect();
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_, _>>()?;
    let sigma = p.s - 1.0;

    let mut de = Vec::new();
    let mut diff = Vec::new();
    let mut closed = Vec::new();
    for i in 0..runs.len() - 1 {
        let (e1, e2) = (p.eps_list[i], p.eps_list[i + 1]);
        if e1 == e2 {
            report.notes.push(format!("pair ({e1}, {e2}) skipped: equal viscosities"));
            continue;
        }
        de.push((e1 - e2).abs());
        diff.push(sup_difference(&runs[i], &runs[i + 1], sigma));
        if f.is_zero() {
            closed.push(linear_difference_closed_form(phi, e1, e2, sigma, &runs[i].times));
        }
    }
    report.series.push(Series::new("sup_difference", "|eps1 - eps2|", "sup_t ||u1 - u2||_{H^{s-1}}", de.clone(), diff.clone()));
    report.notes.push("the bound is one-sided: any order at or above 1/2 is consistent".into());

    if runs.iter().any(|r| r.overflowed()) {
        report.notes.push("a trajectory overflowed; study inconclusive".into());
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    if de.len() < 2 {
        report.notes.push("fewer than two distinct viscosity pairs".into());
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    if !closed.is_empty() {
        let err = diff.iter().zip(&closed).map(|(a, b)| (a - b).abs() / (1.0 + b)).fold(0.0, f64::max);
        report.series.push(Series::new("closed_form", "|eps1 - eps2|", "closed-form sup difference", de, closed));
        report.add_criterion(Criterion::new("closed_form_relative_error", err, Comparison::Le { threshold: 1e-9 }));
    }
    let order = report.add_fit("order", "sup_difference", FitKind::PowerLaw).slope;
    report.add_criterion(Criterion::new("fitted_order", order, Comparison::Ge { threshold: ORDER_THRESHOLD }));
    report.finalize();
    Ok(report)
}
