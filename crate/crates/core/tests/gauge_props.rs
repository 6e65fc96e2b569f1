mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use torus_nls::gauge::{gauge_forward, reconstruct, residual_regression, transformed_residual};
use torus_nls::nonlin_poly::ComplexPolynomial4 as P;
use torus_nls::solver::{evolve, SolverConfig};
use torus_nls::spectral::GridFunction;

const FREQS: [i64; 3] = [8, 16, 32];

/// `(1 + 0.3e^{ix}) + e^{iKx}/K²` evolved for two steps at `n = 256`.
fn regression(f: &P, gauge: bool) -> torus_nls::gauge::ResidualRegression {
    let samples = FREQS
        .iter()
        .map(|&k| {
            let phi = GridFunction::from_modes(
                256,
                &[(0, C::new(1.0, 0.0)), (1, C::new(0.3, 0.0)), (k, C::new(1.0 / (k * k) as f64, 0.0))],
            )
            .unwrap();
            let tr = evolve(f, &phi, &SolverConfig::new(256, 0.0, 1e-5, 2e-5)).unwrap();
            transformed_residual(f, &tr, 1, 2.6, gauge).unwrap()
        })
        .collect();
    residual_regression(&FREQS.map(|k| k as f64), samples).unwrap()
}

#[test]
fn gauged_residual_cancels_first_order_term() {
    for f in [dx_cubic(), i_dx_cubic()] {
        let r = regression(&f, true);
        assert!(r.pass, "D exponent {} vs dxW exponent {}", r.d_fit.exponent, r.dx_w_fit.exponent);
    }
}

#[test]
fn vanishing_fbeta_passes_trivially() {
    let r = regression(&dx_ubar_pow(2), true);
    assert!(r.pass, "D exponent {} vs dxW exponent {}", r.d_fit.exponent, r.dx_w_fit.exponent);
}

#[test]
fn ungauged_residual_fails_for_derivative_coupling() {
    let r = regression(&dx_u_pow(2), false);
    assert!(!r.pass, "D exponent {} vs dxW exponent {}", r.d_fit.exponent, r.dx_w_fit.exponent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reconstruction_and_exponential_inverse(seed in 0u64..10_000, amp in 0.05f64..0.8) {
        let u = smooth_data(64, seed, amp).truncate(15).unwrap();
        for f in [dx_cubic(), i_dx_cubic(), dx_u_pow(2)] {
            let st = gauge_forward(&f, &u).unwrap();
            let back = reconstruct(&st).unwrap();
            prop_assert!((&back - &u.dxx()).l2_norm() <= 1e-12 * (1.0 + u.dxx().l2_norm()));
            let one = st.lambda.values().iter().map(|l| ((-l).exp() * l.exp() - 1.0).norm()).fold(0.0, f64::max);
            prop_assert!(one < 1e-12);
        }
    }
}
