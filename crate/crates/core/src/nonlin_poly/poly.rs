//! Sparse multivariate polynomials with exact Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gauss::GaussianRational;

/// Polynomial in `N` formal variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial<const N: usize> {
    terms: BTreeMap<[u32; N], GaussianRational>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: GaussianRational,
}

impl<const N: usize> Serialize for Polynomial<N> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let list: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr { exponents: e.to_vec(), coeff: c.clone() })
            .collect();
        list.serialize(s)
    }
}

impl<'de, const N: usize> Deserialize<'de> for Polynomial<N> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let list = Vec::<TermRepr>::deserialize(d)?;
        let mut p = Self::zero();
        for t in list {
            let e: [u32; N] = t.exponents.as_slice().try_into().map_err(|_| {
                serde::de::Error::custom(format!("expected {N} exponents, got {}", t.exponents.len()))
            })?;
            p.add_term(e, t.coeff);
        }
        Ok(p)
    }
}

impl<const N: usize> Polynomial<N> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn monomial(exponents: [u32; N], c: GaussianRational) -> Self {
        let mut p = Self::zero();
        p.add_term(exponents, c);
        p
    }

    /// The coordinate polynomial for variable index `i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::monomial(e, GaussianRational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = ([u32; N], GaussianRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponents: [u32; N], c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exponents) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&exponents);
                }
            }
            None => {
                self.terms.insert(exponents, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32; N], &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponents: &[u32; N]) -> GaussianRational {
        self.terms.get(exponents).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(&[0; N])
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, k)| (*e, k * c)))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative in variable `var`.
    pub fn partial(&self, var: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut e2 = *e;
            e2[var] -= 1;
            (e2, c.scale_int(u64::from(e[var])))
        }))
    }

    /// Coefficient conjugation combined with the variable permutation `swap`.
    pub fn conjugate_with(&self, swap: &[usize; N]) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            let mut e2 = [0; N];
            for (i, &j) in swap.iter().enumerate() {
                e2[j] = e[i];
            }
            (e2, c.conj())
        }))
    }

    /// Replace variable `var` with polynomial `q` (composition).
    pub fn substitute(&self, var: usize, q: &Self) -> Self {
        let max = self.degree_in(var);
        let mut powers = vec![Self::one()];
        for k in 1..=max as usize {
            powers.push(&powers[k - 1] * q);
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[var] = 0;
            let part = &Self::monomial(rest, c.clone()) * &powers[e[var] as usize];
            out = out + part;
        }
        out
    }

    /// Embed into a polynomial ring with more variables (new variables have exponent 0).
    pub fn lift<const M: usize>(&self) -> Polynomial<M> {
        assert!(M >= N);
        Polynomial::from_terms(self.terms.iter().map(|(e, c)| {
            let mut e2 = [0; M];
            e2[..N].copy_from_slice(e);
            (e2, c.clone())
        }))
    }

    /// Restrict to the first `M` variables; `None` if a dropped variable occurs.
    pub fn restrict<const M: usize>(&self) -> Option<Polynomial<M>> {
        let mut out = Polynomial::zero();
        for (e, c) in &self.terms {
            if e[M..].iter().any(|&k| k > 0) {
                return None;
            }
            let mut e2 = [0; M];
            e2.copy_from_slice(&e[..M]);
            out.add_term(e2, c.clone());
        }
        Some(out)
    }

    /// Divide each monomial by (its total degree + `shift`).
    pub fn divide_by_degree_plus(&self, shift: u32) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| {
            let d: u32 = e.iter().sum::<u32>() + shift;
            (*e, c.div_rational(&BigRational::from_integer(d.into())))
        }))
    }

    pub fn evaluate(&self, point: &[Complex64; N]) -> Complex64 {
        self.compile().evaluate(point)
    }

    pub fn compile(&self) -> CompiledPoly<N> {
        CompiledPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_complex64())).collect(),
            max_deg: std::array::from_fn(|i| self.degree_in(i)),
        }
    }

    /// Render with the given variable names, e.g. `2*u*uc^2 + (1/2+1i)*ux`.
    pub fn format_with(&self, names: &[&str; N]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(names[i].to_string()),
                    _ => factors.push(format!("{}^{}", names[i], k)),
                }
            }
            let lit = c.to_literal();
            if factors.is_empty() {
                parts.push(lit);
            } else if c.is_one() {
                parts.push(factors.join("*"));
            } else {
                parts.push(format!("{}*{}", lit, factors.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<const N: usize> Add for Polynomial<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<const N: usize> Add for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn add(self, rhs: Self) -> Polynomial<N> {
        self.clone() + rhs.clone()
    }
}

impl<const N: usize> Neg for Polynomial<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_terms(self.terms.into_iter().map(|(e, c)| (e, -c)))
    }
}

impl<const N: usize> Sub for Polynomial<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const N: usize> Sub for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn sub(self, rhs: Self) -> Polynomial<N> {
        self.clone() - rhs.clone()
    }
}

impl<const N: usize> Mul for &Polynomial<N> {
    type Output = Polynomial<N>;
    fn mul(self, rhs: Self) -> Polynomial<N> {
        let mut out = Polynomial::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: [u32; N] = std::array::from_fn(|i| e1[i] + e2[i]);
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl<const N: usize> Mul for Polynomial<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// Floating-point image of a polynomial for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly<const N: usize> {
    terms: Vec<([u32; N], Complex64)>,
    max_deg: [u32; N],
}

impl<const N: usize> CompiledPoly<N> {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, point: &[Complex64; N]) -> Complex64 {
        let powers: [Vec<Complex64>; N] = std::array::from_fn(|i| {
            let mut p = Vec::with_capacity(self.max_deg[i] as usize + 1);
            p.push(Complex64::new(1.0, 0.0));
            for k in 1..=self.max_deg[i] as usize {
                p.push(p[k - 1] * point[i]);
            }
            p
        });
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for i in 0..N {
                if e[i] > 0 {
                    m *= powers[i][e[i] as usize];
                }
            }
            acc += m;
        }
        acc
    }

    /// Evaluate at every grid point; `vars[i][j]` is variable `i` at point `j`.
    pub fn evaluate_grid(&self, vars: [&[Complex64]; N]) -> Vec<Complex64> {
        let len = vars[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        let mut point = [Complex64::new(0.0, 0.0); N];
        for (j, o) in out.iter_mut().enumerate() {
            for i in 0..N {
                point[i] = vars[i][j];
            }
            *o = self.evaluate(&point);
        }
        out
    }
}
