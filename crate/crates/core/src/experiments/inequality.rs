//! Sampled LHS/RHS ratios for the bilinear, product, projection and
//! commutator estimates on random trigonometric polynomials.
//!
//! Products are exact convolutions of the Fourier coefficients, so no
//! aliasing enters the left-hand sides.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Comparison, Criterion, ExperimentReport, Series};
use super::ExperimentError;
use crate::spectral::japanese;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    /// `‖fg‖_{H^{−s₀}} ≲ ‖f‖_{H^{s₁}}‖g‖_{H^{s₂}}`
    Bilinear21,
    /// `‖fg‖_{H^s} ≲ ‖f‖_{H^s}‖g‖_{H^r} + ‖f‖_{H^r}‖g‖_{H^s}`
    Product22,
    /// `‖P₊(fP₋g)‖_{H^s} + ‖P₋(fP₊g)‖_{H^s} ≲ ‖f‖_{H^s}‖g‖_{H^r}`
    Projection23,
    /// `‖[⟨∂ₓ⟩^s, f]∂ₓg‖_{L²} ≲ ‖f‖_{H^{3/2+ε}}‖g‖_{H^s} + ‖f‖_{H^{s+1}}‖g‖_{H^{1/2+ε}}`
    Commutator25,
}

impl Probe {
    pub const ALL: [Probe; 4] = [Probe::Bilinear21, Probe::Product22, Probe::Projection23, Probe::Commutator25];

    pub fn name(self) -> &'static str {
        match self {
            Probe::Bilinear21 => "bilinear_2_1",
            Probe::Product22 => "product_2_2",
            Probe::Projection23 => "projection_2_3",
            Probe::Commutator25 => "commutator_2_5",
        }
    }

    pub fn parse(name: &str) -> Option<Probe> {
        Probe::ALL.into_iter().find(|p| p.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityParams {
    pub probe: Probe,
    /// Bilinear exponents `(s₀, s₁, s₂)`.
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s: f64,
    pub r: f64,
    pub eps: f64,
    /// Spectral decay `|f̂(k)| = ⟨k⟩^{−p_f}(1 + U)`, likewise for `g`.
    pub p_f: f64,
    pub p_g: f64,
    pub samples: usize,
    pub n_list: Vec<usize>,
    pub seed: u64,
    /// Largest admissible growth of the sampled maximum between consecutive grids.
    pub growth_limit: f64,
}

impl InequalityParams {
    /// Exponents at which each estimate is probed; decay rates sit 0.1 above the
    /// threshold needed for the norms on the right to be finite.
    pub fn defaults(probe: Probe) -> Self {
        let base = Self {
            probe,
            s0: 0.0,
            s1: 0.0,
            s2: 0.0,
            s: 0.0,
            r: 0.0,
            eps: 0.0,
            p_f: 0.0,
            p_g: 0.0,
            samples: 500,
            n_list: vec![64, 128, 256],
            seed: 0,
            growth_limit: 2.0,
        };
        match probe {
            Probe::Bilinear21 => Self { s1: 0.3, s2: 0.3, p_f: 0.9, p_g: 0.9, ..base },
            Probe::Product22 => Self { s: 1.0, r: 0.6, p_f: 1.6, p_g: 1.6, ..base },
            Probe::Projection23 => Self { s: 1.0, r: 0.6, p_f: 1.6, p_g: 1.2, ..base },
            Probe::Commutator25 => Self { s: 0.6, eps: 0.1, p_f: 2.2, p_g: 1.2, ..base },
        }
    }

    pub fn check_hypotheses(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Precondition(m.into()));
        match self.probe {
            Probe::Bilinear21 => {
                let (a, b, c) = (self.s0, self.s1, self.s2);
                let m = (a + b).min(b + c).min(c + a);
                let total = a + b + c;
                if !((m >= 0.0 && total > 0.5) || (m > 0.0 && total >= 0.5)) {
                    return bad("bilinear exponents violate the pairwise/total sum conditions");
                }
            }
            Probe::Product22 | Probe::Projection23 => {
                if !(self.s >= 0.0 && self.r > 0.5) {
                    return bad("need s >= 0 and r > 1/2");
                }
            }
            Probe::Commutator25 => {
                if !(self.s >= 0.0 && self.eps > 0.0) {
                    return bad("need s >= 0 and eps > 0");
                }
            }
        }
        if self.samples == 0 || self.n_list.len() < 2 {
            return bad("need samples > 0 and at least two grid sizes");
        }
        if self.n_list.iter().any(|&n| n < 4 || n % 2 != 0) {
            return bad("grid sizes must be even and at least 4");
        }
        Ok(())
    }
}

/// Coefficients `ĉ(k)` for `|k| ≤ half`, stored at index `k + half`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub half: i64,
    pub coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(half: i64) -> Self {
        Self { half, coeffs: vec![Complex64::new(0.0, 0.0); (2 * half + 1) as usize] }
    }

    pub fn from_modes(half: i64, modes: &[(i64, Complex64)]) -> Self {
        let mut s = Self::zeros(half);
        for &(k, c) in modes {
            s.coeffs[(k + half) as usize] += c;
        }
        s
    }

    pub fn get(&self, k: i64) -> Complex64 {
        if k.abs() > self.half {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.half) as usize]
        }
    }

    fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - self.half, c))
    }

    pub fn norm(&self, s: f64) -> f64 {
        self.modes().map(|(k, c)| japanese(k as f64).powf(2.0 * s) * c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn keep(&self, pred: impl Fn(i64) -> bool) -> Self {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            if !pred(i as i64 - self.half) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    fn plus(&self) -> Self {
        self.keep(|k| k > 0)
    }

    fn minus(&self) -> Self {
        self.keep(|k| k < 0)
    }
}

/// `Σ_k w(n, k) f̂(n−k) ĝ(k)` for all output modes `n`.
fn weighted_convolution(f: &Spectrum, g: &Spectrum, w: impl Fn(i64, i64) -> f64) -> Spectrum {
    let half = f.half + g.half;
    let mut out = Spectrum::zeros(half);
    for (k, gk) in g.modes() {
        if gk == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (m, fm) in f.modes() {
            let n = m + k;
            out.coeffs[(n + half) as usize] += fm * gk * w(n, k);
        }
    }
    out
}

pub fn product(f: &Spectrum, g: &Spectrum) -> Spectrum {
    weighted_convolution(f, g, |_, _| 1.0)
}

/// Fourier coefficients of `[⟨∂ₓ⟩^s, f]∂ₓg`, i.e. `Σ_k (⟨n⟩^s − ⟨k⟩^s) ik f̂(n−k) ĝ(k)`.
pub fn commutator(f: &Spectrum, g: &Spectrum, s: f64) -> Spectrum {
    let half = f.half + g.half;
    let mut out = Spectrum::zeros(half);
    for (k, gk) in g.modes() {
        let dg = Complex64::new(0.0, k as f64) * gk;
        let jk = japanese(k as f64).powf(s);
        for (m, fm) in f.modes() {
            let n = m + k;
            out.coeffs[(n + half) as usize] += (japanese(n as f64).powf(s) - jk) * fm * dg;
        }
    }
    out
}

/// Left- and right-hand sides of the selected estimate.
pub fn sides(p: &InequalityParams, f: &Spectrum, g: &Spectrum) -> (f64, f64) {
    match p.probe {
        Probe::Bilinear21 => (product(f, g).norm(-p.s0), f.norm(p.s1) * g.norm(p.s2)),
        Probe::Product22 => (
            product(f, g).norm(p.s),
            f.norm(p.s) * g.norm(p.r) + f.norm(p.r) * g.norm(p.s),
        ),
        Probe::Projection23 => {
            let a = product(f, &g.minus()).plus().norm(p.s);
            let b = product(f, &g.plus()).minus().norm(p.s);
            (a + b, f.norm(p.s) * g.norm(p.r))
        }
        Probe::Commutator25 => (
            commutator(f, g, p.s).norm(0.0),
            f.norm(1.5 + p.eps) * g.norm(p.s) + f.norm(p.s + 1.0) * g.norm(0.5 + p.eps),
        ),
    }
}

/// `|ĉ(k)| = ⟨k⟩^{−p}(1 + U)` with uniform random phase for `|k| < n/2`.
pub fn random_spectrum(rng: &mut impl Rng, n: usize, p: f64) -> Spectrum {
    let half = (n / 2 - 1) as i64;
    let mut s = Spectrum::zeros(half);
    for (i, c) in s.coeffs.iter_mut().enumerate() {
        let k = i as i64 - half;
        let amp = japanese(k as f64).powf(-p) * (1.0 + rng.gen::<f64>());
        *c = Complex64::from_polar(amp, rng.gen_range(0.0..std::f64::consts::TAU));
    }
    s
}

fn sample_ratios(p: &InequalityParams, n: usize) -> Vec<f64> {
    (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
            rng.set_stream(((n as u64) << 32) | i as u64);
            let f = random_spectrum(&mut rng, n, p.p_f);
            let g = random_spectrum(&mut rng, n, p.p_g);
            let (lhs, rhs) = sides(p, &f, &g);
            lhs / rhs
        })
        .collect()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

pub fn inequality_probe(p: &InequalityParams) -> Result<ExperimentReport, ExperimentError> {
    p.check_hypotheses()?;
    let mut report = ExperimentReport::new(p.probe.name(), serde_json::json!({ "params": p }), p.seed);
    let mut maxes = Vec::new();
    let mut p99 = Vec::new();
    for &n in &p.n_list {
        let mut r = sample_ratios(p, n);
        r.sort_by(f64::total_cmp);
        maxes.push(*r.last().expect("samples > 0"));
        p99.push(percentile(&r, 0.99));
    }
    let ns: Vec<f64> = p.n_list.iter().map(|&n| n as f64).collect();
    report.series.push(Series::new("max_ratio", "n", "max LHS/RHS", ns.clone(), maxes.clone()));
    report.series.push(Series::new("p99_ratio", "n", "99th percentile LHS/RHS", ns, p99));
    let step_growth = maxes.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let overall = maxes.last().expect("two grids") / maxes[0];
    report.add_criterion(Criterion::new("max_step_growth", step_growth, Comparison::Lt { threshold: p.growth_limit }));
    report.add_criterion(Criterion::new("overall_growth", overall, Comparison::Lt { threshold: p.growth_limit }));
    report.finalize();
    Ok(report)
}
