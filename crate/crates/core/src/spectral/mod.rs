//! Uniform torus grids, Fourier multipliers, projections and Sobolev norms.
//!
//! Grid points are `x_j = −π + 2πj/n` and Fourier coefficients use the
//! normalized measure, `f̂(k) = (1/2π)∫ f(x) e^{−ikx} dx`. Coefficient vectors
//! are stored in FFT order: index `i` holds wavenumber `i` for `i ≤ n/2` and
//! `i − n` otherwise, so the represented band is `−n/2+1 ..= n/2`.

mod field;
mod io;

pub use field::PolyField;
pub use io::{read_snapshot, read_snapshot_bytes, snapshot_bytes, write_coeff_csv, write_snapshot};

use std::cell::RefCell;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size {0} is not a power of two >= 8")]
    InvalidGridSize(usize),
    #[error("non-finite value at grid index {0}")]
    NonFinite(usize),
    #[error("truncation level {level} exceeds n/2 = {half}")]
    TruncationTooLarge { level: usize, half: usize },
    #[error("malformed snapshot: {0}")]
    MalformedSnapshot(String),
    #[error("i/o error: {0}")]
    Io(String),
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [C64], inverse: bool) {
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

fn check_n(n: usize) -> Result<(), SpectralError> {
    if n >= 8 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(SpectralError::InvalidGridSize(n))
    }
}

/// Wavenumber stored at FFT index `i` for grid size `n`.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// FFT index of wavenumber `k`, if representable.
pub fn index_of(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k > half || k <= -half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}

/// `⟨k⟩ = √(1+k²)`.
pub fn japanese(k: f64) -> f64 {
    (1.0 + k * k).sqrt()
}

/// Grid values to normalized coefficients (any even length).
pub fn values_to_coeffs(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    fft_in_place(&mut buf, false);
    let inv_n = 1.0 / n as f64;
    for (i, c) in buf.iter_mut().enumerate() {
        let sign = if i % 2 == 0 { inv_n } else { -inv_n };
        *c *= sign;
    }
    buf
}

/// Normalized coefficients to grid values (any even length).
pub fn coeffs_to_values(coeffs: &[C64]) -> Vec<C64> {
    let mut buf: Vec<C64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| if i % 2 == 0 { c } else { -c })
        .collect();
    fft_in_place(&mut buf, true);
    buf
}

/// Complex function on the uniform torus grid with both views kept in sync.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<C64>,
    coeffs: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    P0,
    Pneq0,
    Pplus,
    Pminus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
    Both,
}

impl GridFunction {
    pub fn from_values(values: Vec<C64>) -> Result<Self, SpectralError> {
        check_n(values.len())?;
        if let Some(j) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SpectralError::NonFinite(j));
        }
        let coeffs = values_to_coeffs(&values);
        Ok(Self { values, coeffs })
    }

    /// Build from FFT-ordered normalized coefficients.
    pub fn from_coeffs(coeffs: Vec<C64>) -> Result<Self, SpectralError> {
        check_n(coeffs.len())?;
        if let Some(j) = coeffs.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SpectralError::NonFinite(j));
        }
        let values = coeffs_to_values(&coeffs);
        Ok(Self { values, coeffs })
    }

    /// Build from a list of `(k, f̂(k))` pairs; unrepresentable modes are ignored.
    pub fn from_modes(n: usize, modes: &[(i64, C64)]) -> Result<Self, SpectralError> {
        check_n(n)?;
        let mut c = vec![ZERO; n];
        for &(k, a) in modes {
            if let Some(i) = index_of(k, n) {
                c[i] += a;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> C64) -> Result<Self, SpectralError> {
        check_n(n)?;
        Self::from_values((0..n).map(|j| f(grid_point(j, n))).collect())
    }

    pub fn zeros(n: usize) -> Result<Self, SpectralError> {
        Self::constant(n, ZERO)
    }

    pub fn constant(n: usize, c: C64) -> Result<Self, SpectralError> {
        Self::from_modes(n, &[(0, c)])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `f̂(k)`, zero outside the represented band.
    pub fn coeff(&self, k: i64) -> C64 {
        index_of(k, self.n()).map_or(ZERO, |i| self.coeffs[i])
    }

    /// Coefficients in ascending wavenumber order `−n/2+1 ..= n/2`.
    pub fn coeffs_ascending(&self) -> Vec<(i64, C64)> {
        let n = self.n() as i64;
        (-n / 2 + 1..=n / 2).map(|k| (k, self.coeff(k))).collect()
    }

    pub fn mean(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Apply a coefficient-space symbol; the Nyquist mode is zeroed.
    pub fn apply_symbol(&self, symbol: impl Fn(i64) -> C64) -> Self {
        let n = self.n();
        let mut c: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| a * symbol(wavenumber(i, n)))
            .collect();
        c[n / 2] = ZERO;
        Self::from_coeffs_unchecked(c)
    }

    pub fn apply(&self, m: &FourierMultiplier) -> Self {
        self.apply_symbol(|k| m.symbol(k))
    }

    pub fn dx(&self) -> Self {
        self.apply(&FourierMultiplier::Derivative(1))
    }

    pub fn dxx(&self) -> Self {
        self.apply(&FourierMultiplier::Derivative(2))
    }

    /// `∂ₓ⁻¹`, dropping the zero mode.
    pub fn dx_inv(&self) -> Self {
        self.apply(&FourierMultiplier::InverseDerivative)
    }

    /// `⟨∂ₓ⟩^s`.
    pub fn bracket(&self, s: f64) -> Self {
        self.apply(&FourierMultiplier::Bracket(s))
    }

    pub fn conj(&self) -> Self {
        Self::from_values_unchecked(self.values.iter().map(|v| v.conj()).collect())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise map of grid values (no dealiasing).
    pub fn map_values(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_values_unchecked(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise product on the native grid (aliasing not removed).
    pub fn mul_pointwise(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n());
        Self::from_values_unchecked(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        sobolev_norm_coeffs(&self.coeffs, s)
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `(1/n) Σ |f(x_j)|²`, the grid side of Parseval.
    pub fn grid_l2_squared(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.n() as f64
    }

    /// Sobolev inner product `Σ ⟨k⟩^{2s} f̂(k) conj(ĝ(k))`.
    pub fn inner(&self, other: &Self, s: f64) -> C64 {
        let n = self.n();
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * japanese(wavenumber(i, n) as f64).powf(2.0 * s))
            .sum()
    }

    pub fn p0(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn project(&self, which: Projection) -> Self {
        let n = self.n();
        let keep = |k: i64| match which {
            Projection::P0 => k == 0,
            Projection::Pneq0 => k != 0,
            Projection::Pplus => k > 0,
            Projection::Pminus => k < 0,
        };
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| if keep(wavenumber(i, n)) { a } else { ZERO })
            .collect();
        Self::from_coeffs_unchecked(c)
    }

    /// `φ_N`: keep `|k| ≤ level`.
    pub fn truncate(&self, level: usize) -> Result<Self, SpectralError> {
        let n = self.n();
        if level > n / 2 {
            return Err(SpectralError::TruncationTooLarge { level, half: n / 2 });
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| if wavenumber(i, n).unsigned_abs() as usize <= level { a } else { ZERO })
            .collect();
        Ok(Self::from_coeffs_unchecked(c))
    }

    /// Re-sample onto a grid of size `m` by zero-padding or truncating coefficients.
    pub fn resample(&self, m: usize) -> Result<Self, SpectralError> {
        check_n(m)?;
        Ok(Self::from_coeffs_unchecked(resize_coeffs(&self.coeffs, m)))
    }

    /// Grid values on a finer grid of size `m ≥ n` (spectral interpolation).
    pub fn padded_values(&self, m: usize) -> Vec<C64> {
        coeffs_to_values(&resize_coeffs(&self.coeffs, m))
    }

    /// Project values given on a padded grid of size `m` back onto `n` modes.
    pub fn from_padded_values(n: usize, padded: &[C64]) -> Result<Self, SpectralError> {
        if let Some(j) = padded.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(SpectralError::NonFinite(j));
        }
        let mut c = resize_coeffs(&values_to_coeffs(padded), n);
        c[n / 2] = ZERO;
        Self::from_coeffs(c)
    }

    pub(crate) fn from_coeffs_unchecked(coeffs: Vec<C64>) -> Self {
        let values = coeffs_to_values(&coeffs);
        Self { values, coeffs }
    }

    pub(crate) fn from_values_unchecked(values: Vec<C64>) -> Self {
        let coeffs = values_to_coeffs(&values);
        Self { values, coeffs }
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: Self) -> GridFunction {
        assert_eq!(self.n(), rhs.n());
        GridFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: Self) -> GridFunction {
        assert_eq!(self.n(), rhs.n());
        GridFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<C64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: C64) -> GridFunction {
        self.scale(c)
    }
}

pub fn grid_point(j: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / n as f64
}

pub fn sobolev_norm_coeffs(coeffs: &[C64], s: f64) -> f64 {
    let n = coeffs.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| japanese(wavenumber(i, n) as f64).powf(2.0 * s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Copy FFT-ordered coefficients into a vector of length `m`, keeping the
/// common band `|k| < min(n, m)/2` plus `k = min/2` when growing.
fn resize_coeffs(c: &[C64], m: usize) -> Vec<C64> {
    let n = c.len();
    let mut out = vec![ZERO; m];
    let half = (n.min(m) / 2) as i64;
    for (i, &a) in c.iter().enumerate() {
        let k = wavenumber(i, n);
        if k.abs() < half || (m > n && k == half) {
            if let Some(j) = index_of(k, m) {
                out[j] = a;
            }
        }
    }
    out
}

/// Smallest power-of-two grid that multiplies `degree` band-limited factors
/// from an `n`-grid without aliasing into the retained band.
pub fn dealias_size(n: usize, degree: usize) -> usize {
    ((degree + 1) * n / 2 + 1).next_power_of_two().max(n)
}

/// Product of several grid functions, computed on a padded grid.
/// The empty product is the constant 1 (on a grid of size `n`).
pub fn dealias_product(n: usize, fs: &[&GridFunction]) -> Result<GridFunction, SpectralError> {
    if fs.is_empty() {
        return GridFunction::constant(n, C64::new(1.0, 0.0));
    }
    let m = dealias_size(n, fs.len());
    let mut acc = vec![C64::new(1.0, 0.0); m];
    for f in fs {
        for (a, v) in acc.iter_mut().zip(f.padded_values(m)) {
            *a *= v;
        }
    }
    GridFunction::from_padded_values(n, &acc)
}

/// Closed-form Fourier multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum FourierMultiplier {
    /// `(ik)^m`
    Derivative(u32),
    /// `1/(ik)` for `k ≠ 0`, else 0
    InverseDerivative,
    /// `⟨k⟩^s`
    Bracket(f64),
    /// `e^{c k² t}` with `c = (re, im)`
    QuadraticExp { re: f64, im: f64, t: f64 },
}

impl FourierMultiplier {
    pub fn symbol(&self, k: i64) -> C64 {
        let kf = k as f64;
        match *self {
            FourierMultiplier::Derivative(m) => C64::new(0.0, kf).powu(m),
            FourierMultiplier::InverseDerivative => {
                if k == 0 {
                    ZERO
                } else {
                    C64::new(0.0, -1.0 / kf)
                }
            }
            FourierMultiplier::Bracket(s) => C64::new(japanese(kf).powf(s), 0.0),
            FourierMultiplier::QuadraticExp { re, im, t } => (C64::new(re, im) * kf * kf * t).exp(),
        }
    }

    /// Inverse multiplier where one exists (the derivative pair is inverse on `k ≠ 0`).
    pub fn inverse(&self) -> Option<Self> {
        match *self {
            FourierMultiplier::Derivative(1) => Some(FourierMultiplier::InverseDerivative),
            FourierMultiplier::InverseDerivative => Some(FourierMultiplier::Derivative(1)),
            FourierMultiplier::Derivative(_) => None,
            FourierMultiplier::Bracket(s) => Some(FourierMultiplier::Bracket(-s)),
            FourierMultiplier::QuadraticExp { re, im, t } => {
                Some(FourierMultiplier::QuadraticExp { re, im, t: -t })
            }
        }
    }
}

/// Dyadic wavenumbers `2, 4, 8, …` strictly below `n/2`.
pub fn dyadic_modes(n: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut k = 2i64;
    while (k as usize) < n / 2 {
        out.push(k);
        k *= 2;
    }
    out
}

/// `base + amplitude · Σ_{dyadic k} k^{−s−δ} (e^{ikx} and/or e^{−ikx})`.
///
/// Dyadic modes stop below the Nyquist frequency, which has no distinct
/// `±` representation on the grid.
pub fn make_rough_data(s: f64, delta: f64, side: Side, base: &GridFunction, amplitude: f64) -> GridFunction {
    let n = base.n();
    let mut c = base.coeffs().to_vec();
    if amplitude != 0.0 {
        for k in dyadic_modes(n) {
            let a = C64::new(amplitude * (k as f64).powf(-s - delta), 0.0);
            if matches!(side, Side::Plus | Side::Both) {
                c[index_of(k, n).expect("below nyquist")] += a;
            }
            if matches!(side, Side::Minus | Side::Both) {
                c[index_of(-k, n).expect("below nyquist")] += a;
            }
        }
    }
    GridFunction::from_coeffs_unchecked(c)
}
