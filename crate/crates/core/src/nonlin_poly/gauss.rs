//! Gaussian rationals: complex numbers `p + q i` with `p, q` exact rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact complex coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`.
    pub fn from_fractions(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn real(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Division by a nonzero rational.
    pub fn div_rational(&self, d: &BigRational) -> Self {
        Self::new(&self.re / d, &self.im / d)
    }

    pub fn scale_int(&self, k: u64) -> Self {
        let k = BigRational::from_integer(BigInt::from(k));
        Self::new(&self.re * &k, &self.im * &k)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Canonical textual form, e.g. `3/2`, `-1i`, `(1/2-3i)`.
    pub fn to_literal(&self) -> String {
        let re_zero = self.re.is_zero();
        let im_zero = self.im.is_zero();
        match (re_zero, im_zero) {
            (_, true) => rat_literal(&self.re),
            (true, false) => format!("{}i", rat_literal(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                format!("({}{}{}i)", rat_literal(&self.re), sign, rat_literal(&self.im.abs()))
            }
        }
    }
}

fn rat_literal(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_ints(1, 0)
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// Serialized as a pair of exact rational strings.
#[derive(Serialize, Deserialize)]
struct GaussianRationalRepr {
    re: String,
    im: String,
}

impl Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GaussianRationalRepr { re: rat_literal(&self.re), im: rat_literal(&self.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = GaussianRationalRepr::deserialize(d)?;
        let parse = |s: &str| -> Result<BigRational, D::Error> {
            s.parse::<BigRational>().map_err(serde::de::Error::custom)
        };
        Ok(Self::new(parse(&repr.re)?, parse(&repr.im)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = GaussianRational::from_fractions(1, 3, 2, 1);
        let b = GaussianRational::from_fractions(2, 3, -1, 2);
        let sum = &a + &b;
        assert_eq!(sum, GaussianRational::from_fractions(1, 1, 3, 2));
        // (1/3 + 2i)(2/3 - i/2) = 2/9 + 1 + i(-1/6 + 4/3)
        let prod = &a * &b;
        assert_eq!(prod, GaussianRational::from_fractions(11, 9, 7, 6));
    }

    #[test]
    fn literals() {
        assert_eq!(GaussianRational::from_fractions(3, 2, 0, 1).to_literal(), "3/2");
        assert_eq!(GaussianRational::from_ints(0, -1).to_literal(), "-1i");
        assert_eq!(GaussianRational::from_fractions(1, 2, -3, 1).to_literal(), "(1/2-3i)");
    }

    #[test]
    fn serde_roundtrip() {
        let a = GaussianRational::from_fractions(-7, 4, 5, 3);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"re":"-7/4","im":"5/3"}"#);
        let back: GaussianRational = serde_json::from_str(&s).unwrap();
        assert_eq!(a, back);
    }
}
