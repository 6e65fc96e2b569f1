mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use torus_nls::nonlin_poly::ComplexPolynomial4 as P;
use torus_nls::solver::{evolve, load_trajectory, residual, save_trajectory, time_reversed, SolverConfig};
use torus_nls::spectral::GridFunction;

fn data(n: usize) -> GridFunction {
    GridFunction::from_modes(n, &[(1, C::new(0.3, 0.0)), (-2, C::new(0.1, 0.15)), (3, C::new(0.05, -0.05))]).unwrap()
}

#[test]
fn time_reversal_matches_backward_run() {
    // v(t) = ū(T − t) gives v_t + i v_xx = −conj(F(u, u_x, ū, ū_x)), which is F with
    // conjugated coefficients evaluated on the jet of v.
    let n = 32;
    for f in [P::zero(), dx_cubic(), i_dx_cubic(), dx_u_pow(2), dx_ubar_pow(3), mono([0, 0, 0, 1], 0, 1)] {
        let phi = data(n);
        let cfg = SolverConfig::new(n, 0.0, 1e-4, 0.05).with_stride(1000);
        let forward = evolve(&f, &phi, &cfg).unwrap();
        let back = evolve(&time_reversed(&f), &forward.last().conj(), &cfg).unwrap();
        let err = (&back.last().conj() - &phi).l2_norm();
        assert!(err < 1e-8, "{}: {err:e}", f.format_with(&torus_nls::nonlin_poly::VAR_NAMES));
        let coeff_conj = P::from_terms(f.terms().map(|(e, c)| (*e, c.conj())));
        assert_eq!(time_reversed(&f), -coeff_conj);
    }
}

#[test]
fn grid_refinement_is_spectrally_accurate() {
    let f = dx_cubic();
    let cfg = |n| SolverConfig::new(n, 0.01, 2e-4, 0.1).with_stride(10_000);
    let coarse = evolve(&f, &data(64), &cfg(64)).unwrap();
    let fine = evolve(&f, &data(128), &cfg(128)).unwrap();
    let diff = (&coarse.last().resample(128).unwrap() - fine.last()).sobolev_norm(2.0);
    assert!(diff < 1e-8, "{diff:e}");
}

#[test]
fn linear_residual_is_second_order() {
    let phi = smooth_data(32, 2, 0.5);
    let res = |dt: f64| {
        let tr = evolve(&P::zero(), &phi, &SolverConfig::new(32, 0.0, dt, 4.0 * dt)).unwrap();
        residual(&P::zero(), &tr, 2, 2.6).unwrap()
    };
    let (a, b) = (res(2e-3), res(1e-3));
    let ratio = a / b;
    assert!((ratio - 4.0).abs() < 0.25 * 4.0, "ratio {ratio}");
}

#[test]
fn nonlinear_residual_ratio_is_about_four() {
    let f = dx_cubic();
    let phi = data(32);
    let res = |dt: f64| {
        let tr = evolve(&f, &phi, &SolverConfig::new(32, 0.01, dt, 0.2)).unwrap();
        residual(&f, &tr, tr.len() / 2, 2.6).unwrap()
    };
    let ratio = res(2e-3) / res(1e-3);
    assert!((ratio - 4.0).abs() < 1.0, "ratio {ratio}");
}

#[test]
fn constant_solution_is_stationary() {
    // F(c, 0, c̄, 0) = 0 for every F built from derivatives.
    let c = GridFunction::constant(16, C::new(0.7, -0.2)).unwrap();
    let f = dx_cubic() + dx_u_pow(3);
    let tr = evolve(&f, &c, &SolverConfig::new(16, 0.0, 1e-3, 0.01)).unwrap();
    assert!(residual(&f, &tr, 5, 3.0).unwrap() < 1e-10);
    assert!((tr.last() - &c).l2_norm() < 1e-12);
}

#[test]
fn fixed_seed_runs_are_identical_and_persist() {
    let f = i_dx_cubic();
    let cfg = SolverConfig::new(32, 1e-3, 1e-3, 0.05).with_stride(10);
    let a = evolve(&f, &data(32), &cfg).unwrap();
    let b = evolve(&f, &data(32), &cfg).unwrap();
    assert_eq!(a.snapshots, b.snapshots);
    let dir = tempfile::tempdir().unwrap();
    save_trajectory(dir.path(), &a).unwrap();
    let back = load_trajectory(dir.path()).unwrap();
    assert_eq!(back.snapshots, a.snapshots);
    assert_eq!(back.times, a.times);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linear_flow_closed_form(seed in 0u64..1000, eps in 0.0f64..0.2, t_end in 0.05f64..0.5) {
        let phi = smooth_data(16, seed, 1.0);
        let tr = evolve(&P::zero(), &phi, &SolverConfig::new(16, eps, 0.01, t_end)).unwrap();
        let exact = linear_flow(&phi, eps, *tr.times.last().unwrap());
        prop_assert!((tr.last() - &exact).l2_norm() <= 1e-10 * (1.0 + exact.l2_norm()));
    }

    #[test]
    fn zero_data_stays_zero(eps in 0.0f64..0.1) {
        let z = GridFunction::zeros(16).unwrap();
        let tr = evolve(&i_dx_cubic(), &z, &SolverConfig::new(16, eps, 0.01, 0.1)).unwrap();
        prop_assert_eq!(tr.last().l2_norm(), 0.0);
    }
}
