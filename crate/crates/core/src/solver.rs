//! Integrating-factor RK4 for `∂ₜu + (i−ε)∂ₓ²u = F(u, ∂ₓu, ū, ∂ₓū)`.
//!
//! In Fourier variables `∂ₜû = (i−ε)k²û + F̂`, so the linear part is applied
//! exactly through the factor `e^{(i−ε)k²t}` and only `F` is integrated by the
//! Runge–Kutta stages (Lawson's scheme).

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlin_poly::{wirtinger_derivative, ComplexPolynomial4, Var};
use crate::spectral::{self, wavenumber, GridFunction, PolyField, SpectralError};

pub type C64 = Complex64;

/// `H^s` indices recorded in snapshot diagnostics.
pub const DIAGNOSTIC_S: [f64; 4] = [0.0, 1.0, 2.0, 3.0];
const OVERFLOW_NORM: f64 = 1e150;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("initial data has n = {got}, config expects {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("dt = {dt} exceeds the stability limit {limit}")]
    StepSizeRejected { dt: f64, limit: f64 },
    #[error("snapshot index {0} has no neighbours at equal spacing")]
    NotInterior(usize),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub eps: f64,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(n: usize, eps: f64, dt: f64, t_end: f64) -> Self {
        Self { n, eps, dt, t_end, snapshot_stride: 1, seed: 0 }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if self.n < 8 || !self.n.is_power_of_two() {
            return bad(format!("n = {} is not a power of two >= 8", self.n));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be nonnegative", self.t_end));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad(format!("eps = {} must be nonnegative", self.eps));
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be positive".into());
        }
        Ok(())
    }

    /// Number of steps; `dt` is adjusted so that the last step lands on `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(if self.t_end > 0.0 { 1.0 } else { 0.0 }) as usize
    }

    pub fn effective_dt(&self) -> f64 {
        match self.steps() {
            0 => self.dt,
            s => self.t_end / s as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDiagnostics {
    pub time: f64,
    /// `(s, ‖u‖_{H^s})` for `s` in [`DIAGNOSTIC_S`].
    pub hs_norms: Vec<(f64, f64)>,
    pub p0_fbeta: [f64; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFlags {
    /// Time at which a non-finite or huge state was detected; the run stops there.
    pub overflow_at: Option<f64>,
    /// Runs with ε = 0 are for diagnostics only.
    pub diagnostic_only: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub times: Vec<f64>,
    pub snapshots: Vec<GridFunction>,
    pub diagnostics: Vec<SnapshotDiagnostics>,
    pub flags: TrajectoryFlags,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &GridFunction {
        self.snapshots.last().expect("trajectory has at least the initial snapshot")
    }

    pub fn overflowed(&self) -> bool {
        self.flags.overflow_at.is_some()
    }
}

/// `F(u, ∂ₓu, ū, ∂ₓū)`, dealiased to the degree of `F`.
pub fn nonlinearity_apply(f: &ComplexPolynomial4, u: &GridFunction) -> Result<GridFunction, SolverError> {
    Ok(PolyField::new(f).apply(u)?)
}

/// Largest admissible step for data `phi`: `0.5 / (n (1 + max|F_β(φ)|))`.
pub fn stability_limit(f: &ComplexPolynomial4, phi: &GridFunction) -> Result<f64, SolverError> {
    let fb = PolyField::new(&wirtinger_derivative(f, Var::Beta));
    let (_, vals) = fb.padded_values(phi);
    let max = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !max.is_finite() {
        return Err(SpectralError::NonFinite(0).into());
    }
    Ok(0.5 / (phi.n() as f64 * (1.0 + max)))
}

struct Stepper {
    field: PolyField,
    half: Vec<C64>,
    full: Vec<C64>,
    dt: f64,
}

impl Stepper {
    fn new(f: &ComplexPolynomial4, n: usize, eps: f64, dt: f64) -> Self {
        let lin = |i: usize| {
            let k = wavenumber(i, n) as f64;
            C64::new(-eps, 1.0) * k * k
        };
        let half = (0..n).map(|i| (lin(i) * (dt / 2.0)).exp()).collect();
        let full = (0..n).map(|i| (lin(i) * dt).exp()).collect();
        Self { field: PolyField::new(f), half, full, dt }
    }

    fn rhs(&self, c: &[C64]) -> Option<Vec<C64>> {
        if self.field.is_zero() {
            return Some(vec![C64::new(0.0, 0.0); c.len()]);
        }
        let u = GridFunction::from_coeffs(c.to_vec()).ok()?;
        let out = self.field.apply(&u).ok()?;
        Some(out.coeffs().iter().map(|z| z * self.dt).collect())
    }

    fn step(&self, u: &[C64]) -> Option<Vec<C64>> {
        let e = &self.half;
        let e2 = &self.full;
        let n = u.len();
        let k1 = self.rhs(u)?;
        let u2: Vec<C64> = (0..n).map(|i| e[i] * (u[i] + k1[i] * 0.5)).collect();
        let k2 = self.rhs(&u2)?;
        let u3: Vec<C64> = (0..n).map(|i| e[i] * u[i] + k2[i] * 0.5).collect();
        let k3 = self.rhs(&u3)?;
        let u4: Vec<C64> = (0..n).map(|i| e2[i] * u[i] + e[i] * k3[i]).collect();
        let k4 = self.rhs(&u4)?;
        let mut out: Vec<C64> = (0..n)
            .map(|i| e2[i] * u[i] + (e2[i] * k1[i] + e[i] * (k2[i] + k3[i]) * 2.0 + k4[i]) / 6.0)
            .collect();
        out[n / 2] = C64::new(0.0, 0.0);
        let finite = out.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        let norm = spectral::sobolev_norm_coeffs(&out, 0.0);
        (finite && norm < OVERFLOW_NORM).then_some(out)
    }
}

fn diagnostics(fb: &PolyField, u: &GridFunction, time: f64) -> SnapshotDiagnostics {
    let p0 = fb.apply(u).map(|g| g.mean()).unwrap_or(C64::new(f64::NAN, f64::NAN));
    SnapshotDiagnostics {
        time,
        hs_norms: DIAGNOSTIC_S.iter().map(|&s| (s, u.sobolev_norm(s))).collect(),
        p0_fbeta: [p0.re, p0.im],
    }
}

pub fn evolve(f: &ComplexPolynomial4, phi: &GridFunction, cfg: &SolverConfig) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    if phi.n() != cfg.n {
        return Err(SolverError::GridMismatch { expected: cfg.n, got: phi.n() });
    }
    let limit = stability_limit(f, phi)?;
    if cfg.dt > limit {
        return Err(SolverError::StepSizeRejected { dt: cfg.dt, limit });
    }
    evolve_unguarded(f, phi, cfg)
}

/// `evolve` without the step-size guard (for convergence studies that
/// deliberately probe coarse steps).
pub fn evolve_unguarded(
    f: &ComplexPolynomial4,
    phi: &GridFunction,
    cfg: &SolverConfig,
) -> Result<Trajectory, SolverError> {
    cfg.validate()?;
    let n = cfg.n;
    let steps = cfg.steps();
    let dt = cfg.effective_dt();
    let stepper = Stepper::new(f, n, cfg.eps, dt);
    let fb = PolyField::new(&wirtinger_derivative(f, Var::Beta));
    // Start from the representable band.
    let mut c = phi.coeffs().to_vec();
    c[n / 2] = C64::new(0.0, 0.0);
    let u0 = GridFunction::from_coeffs(c.clone())?;
    let mut traj = Trajectory {
        config: cfg.clone(),
        times: vec![0.0],
        diagnostics: vec![diagnostics(&fb, &u0, 0.0)],
        snapshots: vec![u0],
        flags: TrajectoryFlags { overflow_at: None, diagnostic_only: cfg.eps == 0.0 },
    };
    for step in 1..=steps {
        let t = step as f64 * dt;
        match stepper.step(&c) {
            Some(next) => c = next,
            None => {
                traj.flags.overflow_at = Some(t);
                break;
            }
        }
        if step % cfg.snapshot_stride == 0 || step == steps {
            let u = GridFunction::from_coeffs(c.clone())?;
            traj.diagnostics.push(diagnostics(&fb, &u, t));
            traj.snapshots.push(u);
            traj.times.push(t);
        }
    }
    Ok(traj)
}

/// Independent runs in parallel; results keep the input order.
pub fn evolve_batch(
    f: &ComplexPolynomial4,
    jobs: &[(GridFunction, SolverConfig)],
) -> Vec<Result<Trajectory, SolverError>> {
    jobs.par_iter().map(|(phi, cfg)| evolve(f, phi, cfg)).collect()
}

/// `(u, ∂ₓu, ∂ₓ²u)` at a stored snapshot.
pub fn derived_fields(traj: &Trajectory, index: usize) -> (GridFunction, GridFunction, GridFunction) {
    let u = traj.snapshots[index].clone();
    let v = u.dx();
    let w = u.dxx();
    (u, v, w)
}

/// `‖(u(t+h) − u(t−h))/(2h) + (i−ε)∂ₓ²u(t) − F(u(t))‖_{H^{s−2}}` at an interior snapshot.
pub fn residual(f: &ComplexPolynomial4, traj: &Trajectory, index: usize, s: f64) -> Result<f64, SolverError> {
    if index == 0 || index + 1 >= traj.len() {
        return Err(SolverError::NotInterior(index));
    }
    let h1 = traj.times[index] - traj.times[index - 1];
    let h2 = traj.times[index + 1] - traj.times[index];
    if (h1 - h2).abs() > 1e-9 * h1.abs().max(h2.abs()) {
        return Err(SolverError::NotInterior(index));
    }
    let u = &traj.snapshots[index];
    let dudt = (&traj.snapshots[index + 1] - &traj.snapshots[index - 1]).scale(C64::new(0.5 / h1, 0.0));
    let lin = u.dxx().scale(C64::new(-traj.config.eps, 1.0));
    let nl = nonlinearity_apply(f, u)?;
    Ok((&(&dudt + &lin) - &nl).sobolev_norm(s - 2.0))
}

/// `F'(α, β, ᾱ, β̄) = −conj(F(ᾱ, β̄, α, β))`: if `u` solves the ε = 0 equation
/// with `F` then `ū(−t)` solves it with `F'`. The variable swap and the
/// conjugation of the swapped monomials cancel, leaving conjugated coefficients.
pub fn time_reversed(f: &ComplexPolynomial4) -> ComplexPolynomial4 {
    -f.conjugate_with(&[0, 1, 2, 3])
}

#[derive(Serialize, Deserialize)]
struct TrajectoryManifest {
    config: SolverConfig,
    times: Vec<f64>,
    diagnostics: Vec<SnapshotDiagnostics>,
    flags: TrajectoryFlags,
    snapshot_files: Vec<String>,
}

/// Write `manifest.json` plus one binary snapshot file per stored time.
pub fn save_trajectory(dir: &Path, traj: &Trajectory) -> Result<(), SolverError> {
    let io = |e: std::io::Error| SolverError::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut files = Vec::new();
    for (i, (u, &t)) in traj.snapshots.iter().zip(&traj.times).enumerate() {
        let name = format!("snapshot_{i:05}.bin");
        spectral::write_snapshot(&dir.join(&name), u, t)?;
        files.push(name);
    }
    let manifest = TrajectoryManifest {
        config: traj.config.clone(),
        times: traj.times.clone(),
        diagnostics: traj.diagnostics.clone(),
        flags: traj.flags.clone(),
        snapshot_files: files,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| SolverError::Io(e.to_string()))?;
    std::fs::write(dir.join("manifest.json"), text).map_err(io)
}

pub fn load_trajectory(dir: &Path) -> Result<Trajectory, SolverError> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).map_err(|e| SolverError::Io(e.to_string()))?;
    let m: TrajectoryManifest = serde_json::from_str(&text).map_err(|e| SolverError::Io(e.to_string()))?;
    let mut snapshots = Vec::new();
    for name in &m.snapshot_files {
        let (u, _) = spectral::read_snapshot(&dir.join(name))?;
        snapshots.push(u);
    }
    Ok(Trajectory { config: m.config, times: m.times, snapshots, diagnostics: m.diagnostics, flags: m.flags })
}
