//! The energy `E_s = (‖u‖²_{H^{s−2}} + ‖∂ₓu‖²_{H^{s−2}} + ‖W‖²_{H^{s−2}})^{1/2}`
//! along a trajectory, and the empirical constant in `∂ₜE_r ≤ C₁(1 + E_r)`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gauge::{gauge_forward_at, GaugeError};
use crate::nonlin_poly::ComplexPolynomial4;
use crate::solver::Trajectory;

pub const MIN_SNAPSHOTS: usize = 8;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub s: f64,
    pub r: f64,
    pub times: Vec<f64>,
    pub e_s: Vec<f64>,
    pub e_r: Vec<f64>,
    /// `(‖u‖, ‖∂ₓu‖, ‖W‖)` in `H^{s−2}`.
    pub components_s: Vec<[f64; 3]>,
    pub components_r: Vec<[f64; 3]>,
    /// `E_r` with `∂ₓ²u` in place of `W`.
    pub naive_e_r: Vec<f64>,
    /// `‖u‖_{H^r}`.
    pub u_norm_r: Vec<f64>,
    /// `E_s(0)`.
    pub k: f64,
}

fn components(u: &crate::spectral::GridFunction, w: &crate::spectral::GridFunction, sigma: f64) -> [f64; 3] {
    [u.sobolev_norm(sigma), u.dx().sobolev_norm(sigma), w.sobolev_norm(sigma)]
}

fn norm3(c: &[f64; 3]) -> f64 {
    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

pub fn energy_trace(f: &ComplexPolynomial4, traj: &Trajectory, s: f64, r: f64) -> Result<EnergyTrace, EnergyError> {
    if s <= 2.5 {
        return Err(EnergyError::PreconditionViolated(format!("s = {s} must exceed 5/2")));
    }
    if r < s {
        return Err(EnergyError::PreconditionViolated(format!("r = {r} must be at least s = {s}")));
    }
    let mut tr = EnergyTrace {
        s,
        r,
        times: traj.times.clone(),
        e_s: Vec::new(),
        e_r: Vec::new(),
        components_s: Vec::new(),
        components_r: Vec::new(),
        naive_e_r: Vec::new(),
        u_norm_r: Vec::new(),
        k: 0.0,
    };
    for (u, &t) in traj.snapshots.iter().zip(&traj.times) {
        let st = gauge_forward_at(f, u, t)?;
        let cs = components(u, &st.w_gauged, s - 2.0);
        let cr = components(u, &st.w_gauged, r - 2.0);
        let naive = components(u, &u.dxx(), r - 2.0);
        tr.e_s.push(norm3(&cs));
        tr.e_r.push(norm3(&cr));
        tr.naive_e_r.push(norm3(&naive));
        tr.components_s.push(cs);
        tr.components_r.push(cr);
        tr.u_norm_r.push(u.sobolev_norm(r));
    }
    tr.k = tr.e_s.first().copied().unwrap_or(0.0);
    Ok(tr)
}

/// Central differences inside, one-sided at the ends.
pub fn time_derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let m = values.len();
    if m < 2 {
        return vec![0.0; m];
    }
    (0..m)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == m - 1 => (m - 2, m - 1),
                _ => (i - 1, i + 1),
            };
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyInequalityReport {
    /// `max over interior times of ∂ₜE_r / (1 + E_r)`.
    pub c1_hat: f64,
    /// Same ratio for the naive (ungauged) energy.
    pub c1_hat_naive: f64,
    pub ratios: Vec<f64>,
    pub finite: bool,
    /// Upper bounds over the run of `E_r/(1+‖u‖_{H^r})` and `‖u‖_{H^r}/(1+E_r)`.
    pub comparability: [f64; 2],
}

fn max_ratio(times: &[f64], e: &[f64]) -> (f64, Vec<f64>) {
    let d = time_derivative(times, e);
    let ratios: Vec<f64> = (1..e.len() - 1).map(|i| d[i] / (1.0 + e[i])).collect();
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (max, ratios)
}

pub fn verify_energy_inequality(trace: &EnergyTrace) -> Result<EnergyInequalityReport, EnergyError> {
    if trace.times.len() < MIN_SNAPSHOTS {
        return Err(EnergyError::PreconditionViolated(format!(
            "need at least {MIN_SNAPSHOTS} snapshots, got {}",
            trace.times.len()
        )));
    }
    let (c1_hat, ratios) = max_ratio(&trace.times, &trace.e_r);
    let (c1_hat_naive, _) = max_ratio(&trace.times, &trace.naive_e_r);
    let comp = trace.e_r.iter().zip(&trace.u_norm_r).fold([0.0f64; 2], |acc, (e, u)| {
        [acc[0].max(e / (1.0 + u)), acc[1].max(u / (1.0 + e))]
    });
    Ok(EnergyInequalityReport {
        c1_hat,
        c1_hat_naive,
        finite: c1_hat.is_finite(),
        ratios,
        comparability: comp,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub c1_coarse: f64,
    pub c1_fine: f64,
    pub pass: bool,
}

/// `C₁` is stable under `n → 2n` if it grows by less than 50%.
pub fn refinement_stability(coarse: &EnergyInequalityReport, fine: &EnergyInequalityReport) -> RefinementReport {
    let base = coarse.c1_hat.max(0.0);
    let pass = coarse.finite && fine.finite && fine.c1_hat <= 1.5 * base + 1e-9;
    RefinementReport { c1_coarse: coarse.c1_hat, c1_fine: fine.c1_hat, pass }
}

/// Growth horizon `1/(C₁+1) · log((1+2K)/(1+K))`.
pub fn time_horizon(c1: f64, k: f64) -> f64 {
    ((1.0 + 2.0 * k) / (1.0 + k)).ln() / (c1.max(0.0) + 1.0)
}

/// CSV with header `t,E_s,E_r,u,v,W` (components in `H^{s−2}`).
pub fn write_energy_csv(path: &Path, trace: &EnergyTrace) -> Result<(), EnergyError> {
    let io = |e: std::io::Error| EnergyError::Io(e.to_string());
    let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(file, "t,E_s,E_r,u,v,W").map_err(io)?;
    for i in 0..trace.times.len() {
        let c = trace.components_s[i];
        writeln!(file, "{:e},{:e},{:e},{:e},{:e},{:e}", trace.times[i], trace.e_s[i], trace.e_r[i], c[0], c[1], c[2])
            .map_err(io)?;
    }
    file.flush().map_err(io)
}
