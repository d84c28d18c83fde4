//! Coefficient rings.
//!
//! Every series and polynomial container in the crate is generic over a
//! [`Ring`]: a commutative Q-algebra with context-free `zero`/`one`.
//! Concrete rings are exact rationals, Gaussian rationals and `f64`
//! complex numbers; polynomial containers implement the trait as well so
//! they can be nested inside q-series.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplication by a rational scalar.
    fn scale(&self, r: &Rational) -> Self;
    /// Multiplicative inverse, when it exists.
    fn try_inv(&self) -> Option<Self>;

    fn from_rational(r: &Rational) -> Self {
        Self::one().scale(r)
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&rat(n, 1))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Rings that contain a square root of -1.
pub trait ImagUnit: Ring {
    fn imag_unit() -> Self;
}

/// Upper bound on the nilpotency index probed by [`nilpotent_exp`].
pub const NILPOTENCY_PROBE: u32 = 64;

/// `exp(x)` for a nilpotent ring element, as the finite sum of `x^k/k!`.
pub fn nilpotent_exp<R: Ring>(x: &R) -> Result<R> {
    let mut acc = R::one();
    let mut term = R::one();
    for k in 1..=NILPOTENCY_PROBE {
        term = term.mul(x).scale(&rat(1, k as i64));
        if term.is_zero() {
            return Ok(acc);
        }
        acc = acc.add(&term);
    }
    Err(Error::Domain(format!("exp of a non-nilpotent element (no vanishing power below {NILPOTENCY_PROBE})")))
}

/// `log(1 + x)` for a nilpotent ring element.
pub fn nilpotent_log1p<R: Ring>(x: &R) -> Result<R> {
    let mut acc = R::zero();
    let mut power = R::one();
    for k in 1..=NILPOTENCY_PROBE {
        power = power.mul(x);
        if power.is_zero() {
            return Ok(acc);
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = acc.add(&power.scale(&rat(sign, k as i64)));
    }
    Err(Error::Domain("log of a non-unipotent element".into()))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact `1/k!`.
pub fn inv_factorial(k: u32) -> Rational {
    let mut f = BigInt::one();
    for i in 2..=k {
        f *= i;
    }
    Rational::new(BigInt::one(), f)
}

/// `p/q` for non-integers, `p` otherwise.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// `re + im·i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRat { re, im: Zero::zero() }
    }

    pub fn i() -> Self {
        GaussRat { re: Zero::zero(), im: One::one() }
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => GaussRat::real(rat_int(1)),
            1 => GaussRat::i(),
            2 => GaussRat::real(rat_int(-1)),
            _ => GaussRat::new(Zero::zero(), rat_int(-1)),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(&self.re), rational_to_f64(&self.im))
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (Zero::is_zero(&self.re), Zero::is_zero(&self.im)) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({} {} {}*i)", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
            }
        }
    }
}

impl Ring for GaussRat {
    fn zero() -> Self {
        GaussRat::real(Zero::zero())
    }
    fn one() -> Self {
        GaussRat::real(One::one())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRat::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        if Zero::is_zero(&self.im) && Zero::is_zero(&o.im) {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn neg(&self) -> Self {
        GaussRat::new(-&self.re, -&self.im)
    }
    fn scale(&self, r: &Rational) -> Self {
        GaussRat::new(&self.re * r, &self.im * r)
    }
    fn try_inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if Zero::is_zero(&norm) {
            return None;
        }
        Some(GaussRat::new(&self.re / &norm, -&self.im / &norm))
    }
    fn from_rational(r: &Rational) -> Self {
        GaussRat::real(r.clone())
    }
}

impl ImagUnit for GaussRat {
    fn imag_unit() -> Self {
        GaussRat::i()
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        self * rational_to_f64(r)
    }
    fn try_inv(&self) -> Option<Self> {
        if Ring::is_zero(self) {
            None
        } else {
            Some(self.inv())
        }
    }
}

impl ImagUnit for Complex64 {
    fn imag_unit() -> Self {
        Complex64::new(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(a: i64, b: i64, c: i64, d: i64) -> GaussRat {
        GaussRat::new(rat(a, b.max(1)), rat(c, d.max(1)))
    }

    proptest! {
        #[test]
        fn gaussian_ring_axioms(a in (-9i64..9, 1i64..5, -9i64..9, 1i64..5),
                                b in (-9i64..9, 1i64..5, -9i64..9, 1i64..5),
                                c in (-9i64..9, 1i64..5, -9i64..9, 1i64..5)) {
            let (x, y, z) = (gauss(a.0, a.1, a.2, a.3), gauss(b.0, b.1, b.2, b.3), gauss(c.0, c.1, c.2, c.3));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            if let Some(inv) = x.try_inv() {
                prop_assert!(x.mul(&inv).is_one());
            }
        }
    }

    #[test]
    fn i_powers_cycle() {
        assert_eq!(GaussRat::i_pow(2), GaussRat::from_int(-1));
        assert_eq!(GaussRat::i_pow(-1), GaussRat::i().neg());
        assert_eq!(GaussRat::i().mul(&GaussRat::i_pow(3)), GaussRat::one());
    }

    #[test]
    fn exp_of_non_nilpotent_is_rejected() {
        assert!(nilpotent_exp(&rat(1, 2)).is_err());
        assert_eq!(nilpotent_exp(&rat(0, 1)).unwrap(), rat(1, 1));
    }
}
