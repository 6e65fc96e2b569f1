//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torus_nls::nonlin_poly::{ComplexPolynomial4 as P, GaussianRational};
use torus_nls::spectral::GridFunction;

pub fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_ints(re, im)
}

pub fn mono(e: [u32; 4], re: i64, im: i64) -> P {
    P::monomial(e, g(re, im))
}

/// `∂ₓ(ū^m) = m ū^{m−1} ū_x`.
pub fn dx_ubar_pow(m: u32) -> P {
    mono([0, 0, m - 1, 1], m as i64, 0)
}

/// `∂ₓ(u^m) = m u^{m−1} u_x`.
pub fn dx_u_pow(m: u32) -> P {
    mono([m - 1, 1, 0, 0], m as i64, 0)
}

/// `∂ₓ(|u|²u) = 2|u|²u_x + u²ū_x`.
pub fn dx_cubic() -> P {
    mono([1, 1, 1, 0], 2, 0) + mono([2, 0, 0, 1], 1, 0)
}

pub fn i_dx_cubic() -> P {
    dx_cubic().scale(&g(0, 1))
}

/// Direct evaluation `Σ c · αᵃβᵇᾱᶜβ̄ᵈ`, written independently of the library evaluator.
pub fn eval(f: &P, z: [C; 4]) -> C {
    f.terms()
        .map(|(e, c)| {
            let mut v = c.to_complex64();
            for (zi, &k) in z.iter().zip(e.iter()) {
                for _ in 0..k {
                    v *= zi;
                }
            }
            v
        })
        .sum()
}

/// `∂F/∂β` by the five-point stencil, exact for polynomials of degree ≤ 4 in `β`.
pub fn fbeta_numeric(f: &P, z: [C; 4]) -> C {
    let h = 1e-2;
    let at = |d: f64| eval(f, [z[0], z[1] + d, z[2], z[3]]);
    (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h)
}

#[derive(Clone, Debug)]
pub struct TrigPoly {
    pub modes: Vec<(i64, C)>,
}

impl TrigPoly {
    pub fn random(rng: &mut ChaCha8Rng, band: i64) -> Self {
        let modes = (-band..=band)
            .map(|k| (k, C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / (1.0 + k.abs() as f64)))
            .collect();
        Self { modes }
    }

    pub fn value(&self, x: f64) -> C {
        self.modes.iter().map(|&(k, c)| c * C::new(0.0, k as f64 * x).exp()).sum()
    }

    pub fn derivative(&self, x: f64) -> C {
        self.modes.iter().map(|&(k, c)| c * C::new(0.0, k as f64) * C::new(0.0, k as f64 * x).exp()).sum()
    }

    pub fn grid(&self, n: usize) -> GridFunction {
        GridFunction::from_modes(n, &self.modes).unwrap()
    }
}

/// `mean_x Im F_β(ψ, ψₓ, ψ̄, ψ̄ₓ)` by the rectangle rule on `m` points.
pub fn mizohata_numeric(f: &P, psi: &TrigPoly, m: usize) -> f64 {
    let total: f64 = (0..m)
        .map(|j| {
            let x = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * j as f64 / m as f64;
            let (u, ux) = (psi.value(x), psi.derivative(x));
            fbeta_numeric(f, [u, ux, u.conj(), ux.conj()]).im
        })
        .sum();
    total / m as f64
}

/// Quadrature oracle: ill-posed iff some of `samples` seeded ψ gives `|M[ψ]| > threshold`.
pub fn oracle_ill_posed(f: &P, seed: u64, samples: usize, threshold: f64) -> (bool, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let psi = TrigPoly::random(&mut rng, 3);
        best = best.max(mizohata_numeric(f, &psi, 64).abs());
    }
    (best > threshold, best)
}

fn small_rational(rng: &mut ChaCha8Rng) -> (i64, i64) {
    let mut num = rng.gen_range(-4i64..=4);
    if num == 0 {
        num = 1;
    }
    (num, rng.gen_range(1i64..=3))
}

/// Nonlinearities that satisfy the Mizohata-type condition by construction.
pub fn random_well_posed(rng: &mut ChaCha8Rng) -> P {
    let r = |rng: &mut ChaCha8Rng| {
        let (a, b) = small_rational(rng);
        GaussianRational::from_fractions(a, b, 0, 1)
    };
    let ri = |rng: &mut ChaCha8Rng| {
        let (a, b) = small_rational(rng);
        GaussianRational::from_fractions(0, 1, a, b)
    };
    let gaussian = |rng: &mut ChaCha8Rng| {
        let (a, b) = small_rational(rng);
        let (c, d) = small_rational(rng);
        GaussianRational::from_fractions(a, b, c, d)
    };
    // Real-valued β-free factors R(α, ᾱ) with F = R·β.
    let real_factors = [
        P::one(),
        mono([1, 0, 0, 0], 1, 0) + mono([0, 0, 1, 0], 1, 0),
        mono([1, 0, 0, 0], 0, 1) - mono([0, 0, 1, 0], 0, 1),
        mono([1, 0, 1, 0], 1, 0),
        mono([2, 0, 0, 0], 1, 0) + mono([0, 0, 2, 0], 1, 0),
        mono([2, 0, 1, 0], 1, 0) + mono([1, 0, 2, 0], 1, 0),
    ];
    let beta = mono([0, 1, 0, 0], 1, 0);
    let mut f = P::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let term = match rng.gen_range(0..5) {
            // β-free terms never contribute to F_β.
            0 => {
                let e = [rng.gen_range(0..=2), 0, rng.gen_range(0..=1), rng.gen_range(0..=1)];
                P::monomial(e, gaussian(rng))
            }
            1 => real_factors[rng.gen_range(0..real_factors.len())].clone() * beta.clone().scale(&r(rng)),
            // F_β = i c ∂ₓ(u^m) has zero mean.
            2 => {
                let m = rng.gen_range(1..=3u32);
                P::monomial([m - 1, 2, 0, 0], ri(rng).scale_int(m as u64).div_rational(&num_rational::BigRational::from_integer(2.into())))
            }
            // F_β = i c ∂ₓ|u|².
            3 => (mono([0, 2, 1, 0], 1, 0).scale(&GaussianRational::from_fractions(1, 2, 0, 1)) + mono([1, 1, 0, 1], 1, 0))
                .scale(&ri(rng)),
            _ => dx_ubar_pow(rng.gen_range(2..=3)).scale(&gaussian(rng)),
        };
        f = f + term;
    }
    f
}

/// Generic nonlinearities: random Gaussian-rational monomials containing `β`.
pub fn random_generic(rng: &mut ChaCha8Rng) -> P {
    let mut f = P::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let b = rng.gen_range(1..=2u32);
        let rest = 4 - b;
        let a = rng.gen_range(0..=rest.min(2));
        let c = rng.gen_range(0..=(rest - a).min(2));
        let d = rng.gen_range(0..=(rest - a - c).min(1));
        let (p, q) = small_rational(rng);
        let (s, t) = small_rational(rng);
        f = f + P::monomial([a, b, c, d], GaussianRational::from_fractions(p, q, s, t));
    }
    f
}

/// 25 well-posed and 25 generic nonlinearities, interleaved.
pub fn random_family(seed: u64) -> Vec<P> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..50).map(|i| if i % 2 == 0 { random_well_posed(&mut rng) } else { random_generic(&mut rng) }).collect()
}

/// `φ̂(k) e^{(i−ε)k²t}` for the linear flow.
pub fn linear_flow(phi: &GridFunction, eps: f64, t: f64) -> GridFunction {
    let n = phi.n();
    let modes: Vec<(i64, C)> = phi
        .coeffs_ascending()
        .into_iter()
        .map(|(k, c)| {
            let k2 = (k * k) as f64;
            (k, c * C::new(-eps * k2 * t, k2 * t).exp())
        })
        .collect();
    GridFunction::from_modes(n, &modes).unwrap()
}

/// Band-limited smooth random data with `|φ̂(k)| ≲ amp·e^{−|k|/4}`.
pub fn smooth_data(n: usize, seed: u64, amp: f64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (n / 2) as i64;
    let modes: Vec<(i64, C)> = (-half + 1..half)
        .map(|k| {
            let a = amp * (-(k.abs() as f64) / 4.0).exp();
            (k, C::new(rng.gen_range(-a..=a), rng.gen_range(-a..=a)))
        })
        .collect();
    GridFunction::from_modes(n, &modes).unwrap()
}
