//! Frequency-truncated data `φ_N` and the Cauchy property of the solutions `u_N`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, Criterion, ExperimentReport, FitKind, Series, Verdict};
use super::{describe_nonlinearity, ExperimentError};
use crate::classifier::{decide, Status};
use crate::nonlin_poly::ComplexPolynomial4;
use crate::solver::{evolve, SolverConfig, Trajectory};
use crate::spectral::{japanese, GridFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BonaSmithParams {
    pub s: f64,
    pub r: f64,
    pub s0: f64,
    /// `|φ̂(k)| = amplitude · ⟨k⟩^{−s−1/2−tail_excess}`.
    pub tail_excess: f64,
    pub amplitude: f64,
    /// Grid for the data-level rates.
    pub data_n: usize,
    pub data_levels: Vec<usize>,
    /// `M` values; solutions are compared at `N = 2M`.
    pub solution_levels: Vec<usize>,
    pub n: usize,
    pub eps: f64,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
}

impl Default for BonaSmithParams {
    fn default() -> Self {
        Self {
            s: 2.6,
            r: 1.6,
            s0: 2.55,
            tail_excess: 0.05,
            amplitude: 0.2,
            data_n: 1024,
            data_levels: vec![8, 16, 32, 64],
            solution_levels: vec![8, 16, 32],
            n: 256,
            eps: 1e-3,
            dt: 1e-3,
            t_end: 0.1,
            seed: 0,
        }
    }
}

/// Data with `|φ̂(k)| = amplitude · ⟨k⟩^{−s−1/2−excess}` and seeded phases.
pub fn synthetic_data(n: usize, s: f64, excess: f64, amplitude: f64, seed: u64) -> Result<GridFunction, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (n / 2) as i64;
    let modes: Vec<(i64, Complex64)> = (-half + 1..half)
        .map(|k| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (k, Complex64::from_polar(amplitude * japanese(k as f64).powf(-s - 0.5 - excess), theta))
        })
        .collect();
    Ok(GridFunction::from_modes(n, &modes)?)
}

pub fn bona_smith_study(
    f: &ComplexPolynomial4,
    p: &BonaSmithParams,
) -> Result<ExperimentReport, ExperimentError> {
    if !(p.s > 2.5 && p.s0 > 2.5 && p.s0 < p.s) {
        return Err(ExperimentError::Precondition(format!("need 5/2 < s0 < s, got s0 = {}, s = {}", p.s0, p.s)));
    }
    if p.r >= p.s {
        return Err(ExperimentError::Precondition(format!("need r < s, got r = {}", p.r)));
    }
    if p.data_levels.len() < 2 || p.solution_levels.len() < 2 {
        return Err(ExperimentError::Precondition("need at least two truncation levels".into()));
    }
    if p.data_levels.iter().any(|&l| l > p.data_n / 2) || p.solution_levels.iter().any(|&m| 2 * m > p.n / 2) {
        return Err(ExperimentError::Precondition("truncation level exceeds n/2".into()));
    }
    if decide(f)?.status != Status::WellPosed {
        return Err(ExperimentError::Precondition("nonlinearity is not well-posed".into()));
    }
    let mut report = ExperimentReport::new(
        "bona-smith",
        serde_json::json!({ "nonlinearity": describe_nonlinearity(f), "params": p }),
        p.seed,
    );

    // Data level: ‖φ_N − φ‖_{H^r}.
    let phi_fine = synthetic_data(p.data_n, p.s, p.tail_excess, p.amplitude, p.seed)?;
    let levels: Vec<f64> = p.data_levels.iter().map(|&l| l as f64).collect();
    let data_err = p
        .data_levels
        .iter()
        .map(|&l| Ok((&phi_fine.truncate(l)? - &phi_fine).sobolev_norm(p.r)))
        .collect::<Result<Vec<f64>, ExperimentError>>()?;
    report.series.push(Series::new("data_truncation", "N", "||phi_N - phi||_{H^r}", levels, data_err));
    let slope = report.add_fit("data_rate", "data_truncation", FitKind::PowerLaw).slope;
    let target = -(p.s - p.r);
    report.add_criterion(Criterion::new(
        "data_slope",
        slope,
        Comparison::Within { target, tolerance: 0.1 * target.abs() },
    ));

    // Solution level: sup_t ‖u_{2M} − u_M‖_{H^s}.
    let phi = phi_fine.resample(p.n)?;
    let mut needed: Vec<usize> = p.solution_levels.iter().flat_map(|&m| [m, 2 * m]).collect();
    needed.sort_unstable();
    needed.dedup();
    let cfg = SolverConfig { n: p.n, eps: p.eps, dt: p.dt, t_end: p.t_end, snapshot_stride: 1, seed: p.seed };
    let runs: Vec<(usize, Trajectory)> = needed
        .par_iter()
        .map(|&l| Ok((l, evolve(f, &phi.truncate(l)?, &cfg)?)))
        .collect::<Result<_, ExperimentError>>()?;
    let run = |l: usize| &runs.iter().find(|(k, _)| *k == l).expect("level was run").1;
    if runs.iter().any(|(_, t)| t.overflowed()) {
        report.notes.push("a trajectory overflowed; study inconclusive".into());
        report.verdict = Verdict::Inconclusive;
        return Ok(report);
    }
    let ms: Vec<f64> = p.solution_levels.iter().map(|&m| m as f64).collect();
    let mut sol = Vec::new();
    let mut data_cauchy = Vec::new();
    for &m in &p.solution_levels {
        let (a, b) = (run(m), run(2 * m));
        sol.push(a.snapshots.iter().zip(&b.snapshots).map(|(x, y)| (x - y).sobolev_norm(p.s)).fold(0.0, f64::max));
        data_cauchy.push((&phi.truncate(2 * m)? - &phi.truncate(m)?).sobolev_norm(p.s));
    }
    report.series.push(Series::new("solution_cauchy", "M", "sup_t ||u_2M - u_M||_{H^s}", ms.clone(), sol));
    report.series.push(Series::new("data_cauchy", "M", "||phi_2M - phi_M||_{H^s}", ms, data_cauchy));
    let decay = -report.add_fit("solution_rate", "solution_cauchy", FitKind::PowerLaw).slope;
    report.add_fit("data_cauchy_rate", "data_cauchy", FitKind::PowerLaw);
    report.add_criterion(Criterion::new(
        "solution_decay_exponent",
        decay,
        Comparison::Ge { threshold: 0.8 * (p.s - p.s0) },
    ));
    report.finalize();
    Ok(report)
}
