//! Exact polynomial algebra for nonlinearities `F(α, β, ᾱ, β̄)` and for
//! differential densities `G(ψ, ψₓ, ψ̄, ψ̄ₓ)`.
//!
//! Variables are indexed `0 = α, 1 = β, 2 = ᾱ, 3 = β̄`. When the same
//! representation is read as a density the slots are `ψ, ψₓ, ψ̄, ψ̄ₓ`.

mod gauss;
mod poly;

pub use gauss::GaussianRational;
pub use poly::{CompiledPoly, Polynomial};

use num_complex::Complex64;

/// Polynomial in `(α, β, ᾱ, β̄)`.
pub type ComplexPolynomial4 = Polynomial<4>;
/// Polynomial in `(ψ, ψₓ, ψ̄, ψ̄ₓ)`.
pub type DifferentialDensity = Polynomial<4>;
/// Second-order jet polynomial in `(ψ, ψₓ, ψ̄, ψ̄ₓ, ψₓₓ, ψ̄ₓₓ)`.
pub type JetPolynomial = Polynomial<6>;

pub const VAR_NAMES: [&str; 4] = ["u", "ux", "uc", "uxc"];
pub const DENSITY_NAMES: [&str; 4] = ["psi", "psix", "psic", "psixc"];
pub const JET_NAMES: [&str; 6] = ["psi", "psix", "psic", "psixc", "psixx", "psixxc"];

const SWAP4: [usize; 4] = [2, 3, 0, 1];
const SWAP6: [usize; 6] = [2, 3, 0, 1, 5, 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Var {
    Alpha,
    Beta,
    AlphaBar,
    BetaBar,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Alpha, Var::Beta, Var::AlphaBar, Var::BetaBar];

    pub fn index(self) -> usize {
        match self {
            Var::Alpha => 0,
            Var::Beta => 1,
            Var::AlphaBar => 2,
            Var::BetaBar => 3,
        }
    }

    pub fn conj(self) -> Var {
        Var::ALL[SWAP4[self.index()]]
    }
}

/// Formal partial derivative in one of the four Wirtinger variables.
pub fn wirtinger_derivative(p: &ComplexPolynomial4, var: Var) -> ComplexPolynomial4 {
    p.partial(var.index())
}

/// Formal complex conjugation: conjugate coefficients, swap α↔ᾱ and β↔β̄.
pub fn conjugate_poly(p: &ComplexPolynomial4) -> ComplexPolynomial4 {
    p.conjugate_with(&SWAP4)
}

/// Conjugation on second-order jets (also swaps ψₓₓ↔ψ̄ₓₓ).
pub fn conjugate_jet(p: &JetPolynomial) -> JetPolynomial {
    p.conjugate_with(&SWAP6)
}

/// `Im p = (p − conj p)/(2i)`, a real-valued density.
pub fn im_part(p: &ComplexPolynomial4) -> DifferentialDensity {
    let diff = p - &conjugate_poly(p);
    diff.scale(&GaussianRational::from_fractions(0, 1, -1, 2))
}

/// `Re p = (p + conj p)/2`.
pub fn re_part(p: &ComplexPolynomial4) -> DifferentialDensity {
    let sum = p + &conjugate_poly(p);
    sum.scale(&GaussianRational::from_fractions(1, 2, 0, 1))
}

/// Floating-point evaluation at `(α, β, ᾱ, β̄)`.
pub fn evaluate(p: &ComplexPolynomial4, point: [Complex64; 4]) -> Complex64 {
    p.evaluate(&point)
}

/// Point `(z, ζ, z̄, ζ̄)` with conjugate-consistent slots.
pub fn consistent_point(z: Complex64, zeta: Complex64) -> [Complex64; 4] {
    [z, zeta, z.conj(), zeta.conj()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = ComplexPolynomial4;

    fn c(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_ints(re, im)
    }

    fn mono(e: [u32; 4], re: i64, im: i64) -> P {
        P::monomial(e, c(re, im))
    }

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_power_rule() {
        // α²β̄ → 2αβ̄
        let p = mono([2, 0, 0, 1], 1, 0);
        assert_eq!(wirtinger_derivative(&p, Var::Alpha), mono([1, 0, 0, 1], 2, 0));
    }

    #[test]
    fn derivative_of_conjugate_power_in_beta_vanishes() {
        let p = mono([0, 0, 1, 1], 2, 0);
        assert!(wirtinger_derivative(&p, Var::Beta).is_zero());
    }

    #[test]
    fn derivative_cubic_derivative_nls() {
        // 2αᾱβ + α²β̄, ∂β → 2αᾱ
        let p = mono([1, 1, 1, 0], 2, 0) + mono([2, 0, 0, 1], 1, 0);
        assert_eq!(wirtinger_derivative(&p, Var::Beta), mono([1, 0, 1, 0], 2, 0));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(conjugate_poly(&mono([1, 1, 0, 0], 0, 1)), mono([0, 0, 1, 1], 0, -1));
        assert_eq!(conjugate_poly(&mono([1, 1, 1, 0], 2, 0)), mono([1, 0, 1, 1], 2, 0));
        assert!(conjugate_poly(&P::zero()).is_zero());
    }

    #[test]
    fn im_part_examples() {
        assert!(im_part(&mono([1, 0, 1, 0], 2, 0)).is_zero());
        assert_eq!(im_part(&mono([1, 0, 1, 0], 0, 2)), mono([1, 0, 1, 0], 2, 0));
        // Im(αβ) = (αβ − ᾱβ̄)/(2i) = −(i/2)αβ + (i/2)ᾱβ̄
        let expect = P::monomial([1, 1, 0, 0], GaussianRational::from_fractions(0, 1, -1, 2))
            + P::monomial([0, 0, 1, 1], GaussianRational::from_fractions(0, 1, 1, 2));
        assert_eq!(im_part(&mono([1, 1, 0, 0], 1, 0)), expect);
    }

    #[test]
    fn evaluate_examples() {
        let p = mono([1, 0, 0, 1], 1, 0);
        let v = evaluate(&p, [cx(1.0, 1.0), cx(0.0, 0.0), cx(1.0, -1.0), cx(2.0, 0.0)]);
        assert_eq!(v, cx(2.0, 2.0));
        let q = mono([1, 0, 1, 0], 2, 0);
        let v = evaluate(&q, [cx(0.0, 1.0), cx(0.0, 0.0), cx(0.0, -1.0), cx(0.0, 0.0)]);
        assert_eq!(v, cx(2.0, 0.0));
        assert_eq!(evaluate(&P::zero(), [cx(3.0, 1.0); 4]), cx(0.0, 0.0));
    }

    fn arb_poly(max_deg: u32, max_coeff: i64) -> impl Strategy<Value = P> {
        let term = (
            prop::array::uniform4(0..=max_deg),
            -max_coeff..=max_coeff,
            -max_coeff..=max_coeff,
            1i64..=3,
        );
        prop::collection::vec(term, 0..5).prop_map(move |ts| {
            P::from_terms(ts.into_iter().filter_map(|(e, re, im, den)| {
                let total: u32 = e.iter().sum();
                (total <= max_deg).then(|| (e, GaussianRational::from_fractions(re, den, im, den)))
            }))
        })
    }

    fn arb_point() -> impl Strategy<Value = [Complex64; 4]> {
        prop::array::uniform4((-2.0f64..2.0, -2.0f64..2.0)).prop_map(|a| a.map(|(r, i)| cx(r, i)))
    }

    proptest! {
        #[test]
        fn mixed_partials_commute(p in arb_poly(4, 5), i in 0usize..4, j in 0usize..4) {
            let a = Var::ALL[i];
            let b = Var::ALL[j];
            let ab = wirtinger_derivative(&wirtinger_derivative(&p, a), b);
            let ba = wirtinger_derivative(&wirtinger_derivative(&p, b), a);
            prop_assert_eq!(ab, ba);
        }

        #[test]
        fn conjugation_is_involution(p in arb_poly(4, 5)) {
            prop_assert_eq!(conjugate_poly(&conjugate_poly(&p)), p);
        }

        #[test]
        fn im_part_is_real_on_consistent_points(p in arb_poly(4, 5), z in (-2.0f64..2.0, -2.0f64..2.0), w in (-2.0f64..2.0, -2.0f64..2.0)) {
            let g = im_part(&p);
            let v = evaluate(&g, consistent_point(cx(z.0, z.1), cx(w.0, w.1)));
            prop_assert!(v.im.abs() < 1e-10 * (1.0 + v.norm()));
            let full = evaluate(&p, consistent_point(cx(z.0, z.1), cx(w.0, w.1)));
            prop_assert!((v.re - full.im).abs() < 1e-10 * (1.0 + full.norm()));
        }

        #[test]
        fn evaluate_is_ring_homomorphism(p in arb_poly(3, 10), q in arb_poly(3, 10), pt in arb_point()) {
            let sum = evaluate(&(&p + &q), pt);
            let prod = evaluate(&(&p * &q), pt);
            let (a, b) = (evaluate(&p, pt), evaluate(&q, pt));
            let scale = 1.0 + a.norm() * b.norm() + a.norm() + b.norm();
            prop_assert!((sum - (a + b)).norm() < 1e-12 * scale);
            prop_assert!((prod - a * b).norm() < 1e-12 * scale);
        }
    }
}
