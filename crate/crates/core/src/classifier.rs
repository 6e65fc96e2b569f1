//! Exact well-/ill-posedness classification of polynomial nonlinearities.
//!
//! The density `G = Im F_β(ψ, ψₓ, ψ̄, ψ̄ₓ)` has zero mean for every periodic
//! `ψ` exactly when it is a total derivative `Dₓ Φ(ψ, ψ̄)`. That is decided by
//! the Euler operator together with the constant term of `G`. When the test
//! fails a concrete `ψ` with nonzero mean is searched for.

use std::cmp::Ordering;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nonlin_poly::{
    im_part, wirtinger_derivative, ComplexPolynomial4, DifferentialDensity, GaussianRational, JetPolynomial,
    Var, JET_NAMES,
};
use crate::spectral::{GridFunction, PolyField, SpectralError};

pub const WITNESS_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_SEED: u64 = 20_240_601;
const WITNESS_GRID: usize = 64;
const LATTICE_RADIUS: i64 = 3;
const RANDOM_BUDGET: usize = 2000;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("no witness with |M| > {threshold} after {attempts} candidates")]
    WitnessNotFound { attempts: usize, threshold: f64 },
    #[error("potential check failed: {0}")]
    ExactnessViolation(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    WellPosed,
    IllPosed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Constant,
    ThreeMode,
    RandomTrig,
}

/// A periodic function `ψ = Σ c_k e^{ikx}` with nonzero Mizohata mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub description: String,
    /// `(k, [re, im])` Fourier coefficients.
    pub modes: Vec<(i64, [f64; 2])>,
    pub mizohata_value: f64,
    /// Position in the deterministic search order.
    pub search_index: usize,
}

impl Witness {
    pub fn grid(&self, n: usize) -> Result<GridFunction, SpectralError> {
        let modes: Vec<(i64, Complex64)> =
            self.modes.iter().map(|&(k, [re, im])| (k, Complex64::new(re, im))).collect();
        GridFunction::from_modes(n, &modes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub status: Status,
    pub f_beta: ComplexPolynomial4,
    pub density: DifferentialDensity,
    pub euler_zero: bool,
    pub constant_term_zero: bool,
    pub potential: Option<DifferentialDensity>,
    pub witness: Option<Witness>,
    pub mizohata_value_at_witness: f64,
    /// `M[ψ ≡ 1]`, reported for every nonlinearity.
    pub mizohata_at_one: f64,
    pub seed: u64,
}

/// Normalized mean of `Im F_β(ψ, ψₓ, ψ̄, ψ̄ₓ)` over the torus.
pub fn mizohata_functional(f: &ComplexPolynomial4, psi: &GridFunction) -> Result<f64, ClassifierError> {
    let g = im_part(&wirtinger_derivative(f, Var::Beta));
    density_mean(&g, psi)
}

/// Mean of a density evaluated at `(ψ, ψₓ, ψ̄, ψ̄ₓ)`; exact for band-limited `ψ`.
pub fn density_mean(g: &DifferentialDensity, psi: &GridFunction) -> Result<f64, ClassifierError> {
    if !psi.is_finite() {
        return Err(SpectralError::NonFinite(0).into());
    }
    let (_, vals) = PolyField::new(g).padded_values(psi);
    if vals.iter().any(|v| !v.re.is_finite()) {
        return Err(SpectralError::NonFinite(0).into());
    }
    Ok(vals.iter().map(|v| v.re).sum::<f64>() / vals.len() as f64)
}

/// Total derivative on first-order jets: `ψₓ∂_ψ + ψₓₓ∂_{ψₓ} + ψ̄ₓ∂_{ψ̄} + ψ̄ₓₓ∂_{ψ̄ₓ}`.
pub fn total_derivative(p: &JetPolynomial) -> JetPolynomial {
    assert!(
        p.degree_in(4) == 0 && p.degree_in(5) == 0,
        "total derivative is only defined here on first-order expressions"
    );
    let mut out = JetPolynomial::zero();
    for (var, jet) in [(0, 1), (1, 4), (2, 3), (3, 5)] {
        out = out + &p.partial(var) * &JetPolynomial::var(jet);
    }
    out
}

/// `(E_ψ G, E_ψ̄ G)` for a first-order density.
pub fn euler_operator(g: &DifferentialDensity) -> (JetPolynomial, JetPolynomial) {
    let g6: JetPolynomial = g.lift();
    let e_psi = g6.partial(0) - total_derivative(&g6.partial(1));
    let e_psibar = g6.partial(2) - total_derivative(&g6.partial(3));
    (e_psi, e_psibar)
}

/// `Φ(ψ, ψ̄)` with `Dₓ Φ = G`, via the homotopy formula.
pub fn construct_potential(g: &DifferentialDensity) -> Result<DifferentialDensity, ClassifierError> {
    let h = &DifferentialDensity::var(0) * &g.partial(1) + &DifferentialDensity::var(2) * &g.partial(3);
    let phi = h.divide_by_degree_plus(0);
    if phi.degree_in(1) > 0 || phi.degree_in(3) > 0 {
        return Err(ClassifierError::ExactnessViolation("potential depends on derivatives".into()));
    }
    let check = total_derivative(&phi.lift());
    if check != g.lift() {
        return Err(ClassifierError::ExactnessViolation(format!(
            "D_x(Phi) = {} differs from G",
            check.format_with(&JET_NAMES)
        )));
    }
    Ok(phi)
}

pub fn decide(f: &ComplexPolynomial4) -> Result<ClassificationVerdict, ClassifierError> {
    decide_with_seed(f, DEFAULT_SEED)
}

pub fn decide_with_seed(f: &ComplexPolynomial4, seed: u64) -> Result<ClassificationVerdict, ClassifierError> {
    let f_beta = wirtinger_derivative(f, Var::Beta);
    let density = im_part(&f_beta);
    let (e1, e2) = euler_operator(&density);
    let euler_zero = e1.is_zero() && e2.is_zero();
    let constant_term_zero = density.constant_term().is_zero();
    let one = GridFunction::constant(WITNESS_GRID, Complex64::new(1.0, 0.0))?;
    let mizohata_at_one = density_mean(&density, &one)?;
    let mut verdict = ClassificationVerdict {
        status: Status::WellPosed,
        f_beta,
        density,
        euler_zero,
        constant_term_zero,
        potential: None,
        witness: None,
        mizohata_value_at_witness: 0.0,
        mizohata_at_one,
        seed,
    };
    if euler_zero && constant_term_zero {
        verdict.potential = Some(construct_potential(&verdict.density)?);
    } else {
        let w = find_witness_for_density(&verdict.density, seed)?;
        verdict.status = Status::IllPosed;
        verdict.mizohata_value_at_witness = w.mizohata_value;
        verdict.witness = Some(w);
    }
    Ok(verdict)
}

pub fn find_witness(f: &ComplexPolynomial4, seed: u64) -> Result<Witness, ClassifierError> {
    find_witness_for_density(&im_part(&wirtinger_derivative(f, Var::Beta)), seed)
}

/// Gaussian rationals `(a + bi)/d`, `d ∈ {1, 2}`, ordered by denominator,
/// then modulus, then argument in `[0, 2π)`.
pub fn constant_lattice() -> Vec<GaussianRational> {
    let mut pts: Vec<(i64, i64, i64)> = Vec::new();
    for d in [1i64, 2] {
        for a in -LATTICE_RADIUS * d..=LATTICE_RADIUS * d {
            for b in -LATTICE_RADIUS * d..=LATTICE_RADIUS * d {
                if d == 2 && a % 2 == 0 && b % 2 == 0 {
                    continue;
                }
                pts.push((a, b, d));
            }
        }
    }
    let angle = |a: i64, b: i64| {
        let t = (b as f64).atan2(a as f64);
        if t < 0.0 {
            t + std::f64::consts::TAU
        } else {
            t
        }
    };
    pts.sort_by(|&(a1, b1, d1), &(a2, b2, d2)| {
        d1.cmp(&d2)
            .then((a1 * a1 + b1 * b1).cmp(&(a2 * a2 + b2 * b2)))
            .then(angle(a1, b1).partial_cmp(&angle(a2, b2)).unwrap_or(Ordering::Equal))
    });
    pts.into_iter().map(|(a, b, d)| GaussianRational::from_fractions(a, d, b, d)).collect()
}

fn gauss_literal(c: &Complex64) -> String {
    GaussianRational::new(to_rat(c.re), to_rat(c.im)).to_literal()
}

fn to_rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

fn describe(modes: &[(i64, [f64; 2])]) -> String {
    let parts: Vec<String> = modes
        .iter()
        .filter(|(_, c)| c[0] != 0.0 || c[1] != 0.0)
        .map(|&(k, [re, im])| {
            let lit = gauss_literal(&Complex64::new(re, im));
            match k {
                0 => lit,
                1 => format!("{lit}*e^(ix)"),
                -1 => format!("{lit}*e^(-ix)"),
                _ => format!("{lit}*e^({k}ix)"),
            }
        })
        .collect();
    if parts.is_empty() {
        "psi = 0".into()
    } else {
        format!("psi = {}", parts.join(" + "))
    }
}

fn find_witness_for_density(g: &DifferentialDensity, seed: u64) -> Result<Witness, ClassifierError> {
    let mut index = 0usize;
    let try_modes = |kind: WitnessKind, modes: Vec<(i64, [f64; 2])>, index: &mut usize| -> Result<Option<Witness>, ClassifierError> {
        *index += 1;
        let cm: Vec<(i64, Complex64)> = modes.iter().map(|&(k, [a, b])| (k, Complex64::new(a, b))).collect();
        let psi = GridFunction::from_modes(WITNESS_GRID, &cm)?;
        let m = density_mean(g, &psi)?;
        Ok((m.abs() > WITNESS_THRESHOLD).then(|| Witness {
            kind,
            description: describe(&modes),
            modes,
            mizohata_value: m,
            search_index: *index - 1,
        }))
    };

    for c in constant_lattice() {
        let z = c.to_complex64();
        if let Some(w) = try_modes(WitnessKind::Constant, vec![(0, [z.re, z.im])], &mut index)? {
            return Ok(w);
        }
    }

    let small = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
    for c0 in small {
        for c1 in small {
            for c2 in small {
                let modes = vec![(0, c0), (1, c1), (-1, c2)];
                if let Some(w) = try_modes(WitnessKind::ThreeMode, modes, &mut index)? {
                    return Ok(w);
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_BUDGET {
        let deg: i64 = rng.gen_range(1..=8);
        let modes: Vec<(i64, [f64; 2])> = (-deg..=deg)
            .map(|k| {
                let scale = 1.0 / (1.0 + k.abs() as f64);
                (k, [scale * rng.gen_range(-1.0..1.0), scale * rng.gen_range(-1.0..1.0)])
            })
            .collect();
        if let Some(w) = try_modes(WitnessKind::RandomTrig, modes, &mut index)? {
            return Ok(w);
        }
    }
    Err(ClassifierError::WitnessNotFound { attempts: index, threshold: WITNESS_THRESHOLD })
}
