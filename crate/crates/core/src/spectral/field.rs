//! Dealiased pointwise evaluation of polynomial nonlinearities on grid functions.

use crate::nonlin_poly::{CompiledPoly, ComplexPolynomial4};

use super::{dealias_size, GridFunction, SpectralError, C64};

/// A polynomial `P(α, β, ᾱ, β̄)` prepared for evaluation at `(u, ∂ₓu, ū, ∂ₓū)`.
#[derive(Clone, Debug)]
pub struct PolyField {
    compiled: CompiledPoly<4>,
    degree: usize,
}

impl PolyField {
    pub fn new(p: &ComplexPolynomial4) -> Self {
        Self { compiled: p.compile(), degree: p.degree() as usize }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.compiled.is_zero()
    }

    /// Values on the padded grid used for dealiasing, with its size.
    pub fn padded_values(&self, u: &GridFunction) -> (usize, Vec<C64>) {
        let n = u.n();
        let m = dealias_size(n, self.degree.max(1));
        let a = u.padded_values(m);
        let b = u.dx().padded_values(m);
        let ac: Vec<C64> = a.iter().map(|z| z.conj()).collect();
        let bc: Vec<C64> = b.iter().map(|z| z.conj()).collect();
        (m, self.compiled.evaluate_grid([&a, &b, &ac, &bc]))
    }

    /// `P(u, ∂ₓu, ū, ∂ₓū)` projected back to the `n`-mode grid.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction, SpectralError> {
        let (_, vals) = self.padded_values(u);
        GridFunction::from_padded_values(u.n(), &vals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin_poly::GaussianRational;

    #[test]
    fn product_of_field_and_derivative() {
        // αβ at u = 1 + e^{ix} gives i e^{ix} + i e^{2ix}
        let p = ComplexPolynomial4::monomial([1, 1, 0, 0], GaussianRational::from_ints(1, 0));
        let u = GridFunction::from_modes(16, &[(0, C64::new(1.0, 0.0)), (1, C64::new(1.0, 0.0))]).unwrap();
        let out = PolyField::new(&p).apply(&u).unwrap();
        assert!((out.coeff(1) - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((out.coeff(2) - C64::new(0.0, 1.0)).norm() < 1e-14);
        assert!(out.coeff(0).norm() < 1e-14);
    }
}
