mod common;

use common::*;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use torus_nls::energy::{energy_trace, refinement_stability, verify_energy_inequality, EnergyInequalityReport, EnergyTrace};
use torus_nls::nonlin_poly::ComplexPolynomial4 as P;
use torus_nls::solver::{evolve, SolverConfig};
use torus_nls::spectral::GridFunction;

/// `0.3e^{ix}` plus a `|k|^{−4}` tail filling the whole grid.
fn rough(n: usize) -> GridFunction {
    let mut modes = vec![(1i64, C::new(0.3, 0.0))];
    for k in 2..(n as i64 / 2) {
        let a = 0.3 / (k as f64).powi(4);
        modes.push((k, C::new(a, 0.0)));
        modes.push((-k, C::new(0.0, a)));
    }
    GridFunction::from_modes(n, &modes).unwrap()
}

fn plane(n: usize) -> GridFunction {
    GridFunction::from_modes(n, &[(1, C::new(0.1, 0.0))]).unwrap()
}

fn run(f: &P, phi: &GridFunction, eps: f64) -> (EnergyTrace, EnergyInequalityReport) {
    let tr = evolve(f, phi, &SolverConfig::new(phi.n(), eps, 5e-4, 0.05).with_stride(10)).unwrap();
    let trace = energy_trace(f, &tr, 2.6, 3.0).unwrap();
    let rep = verify_energy_inequality(&trace).unwrap();
    (trace, rep)
}

#[test]
fn linear_flow_energy_is_non_increasing() {
    for eps in [0.0, 1e-4, 1e-2] {
        for phi in [rough(64), plane(64), smooth_data(64, 5, 0.5)] {
            let (_, rep) = run(&P::zero(), &phi, eps);
            assert!(rep.c1_hat <= 1e-12, "eps {eps}: {}", rep.c1_hat);
        }
    }
}

#[test]
fn well_posed_constant_is_refinement_stable() {
    let f = dx_cubic();
    let (_, a) = run(&f, &plane(128), 1e-2);
    let (_, b) = run(&f, &plane(256), 1e-2);
    assert!(refinement_stability(&a, &b).pass, "{} -> {}", a.c1_hat, b.c1_hat);

    let reps: Vec<_> = [64, 128, 256].map(|n| run(&f, &rough(n), 1e-4).1).into();
    for w in reps.windows(2) {
        assert!(refinement_stability(&w[0], &w[1]).pass, "{} -> {}", w[0].c1_hat, w[1].c1_hat);
    }
}

#[test]
fn ill_posed_constant_grows_with_resolution() {
    let f = i_dx_cubic();
    let c: Vec<f64> = [64, 128, 256].iter().map(|&n| run(&f, &rough(n), 1e-4).1.c1_hat).collect();
    assert!(c[0] < c[1] && c[1] < c[2], "{c:?}");
    assert!(c[2] > 2.0 * c[0], "{c:?}");
    let (_, a) = run(&f, &rough(128), 1e-4);
    let (_, b) = run(&f, &rough(256), 1e-4);
    assert!(!refinement_stability(&a, &b).pass);
}

#[test]
fn energy_is_comparable_to_sobolev_norm() {
    for n in [64, 128, 256] {
        let (_, rep) = run(&dx_cubic(), &rough(n), 1e-2);
        assert!(rep.comparability[0] < 1.0 && rep.comparability[1] < 1.0, "{:?}", rep.comparability);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn energy_is_monotone_in_regularity(seed in 0u64..1000, s in 2.55f64..3.5, gap in 0.1f64..1.0) {
        let phi = smooth_data(32, seed, 0.3);
        let f = dx_cubic();
        let tr = evolve(&f, &phi, &SolverConfig::new(32, 1e-2, 1e-3, 0.01).with_stride(5)).unwrap();
        let trace = energy_trace(&f, &tr, s, s + gap).unwrap();
        for (lo, hi) in trace.e_s.iter().zip(&trace.e_r) {
            prop_assert!(*lo <= *hi * (1.0 + 1e-12));
        }
    }
}
