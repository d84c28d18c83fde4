//! Dense univariate polynomials truncated above a fixed degree.
//!
//! Used for the exterior-power parameter `t` (exact polynomials of degree
//! at most the bundle rank), for one-variable Taylor series such as the
//! Todd generating function, and for numeric ε-jets.

use std::fmt;

use crate::ring::{nilpotent_log1p, ImagUnit, Rational, Ring};

/// `Σ c_k t^k` with every degree above `cap` discarded. `cap == usize::MAX`
/// marks a constant, which can be mixed freely with any truncation.
#[derive(Clone, PartialEq)]
pub struct TruncPoly<C> {
    coeffs: Vec<C>,
    cap: usize,
}

impl<C: Ring> TruncPoly<C> {
    pub fn new(mut coeffs: Vec<C>, cap: usize) -> Self {
        if cap != usize::MAX && coeffs.len() > cap + 1 {
            coeffs.truncate(cap + 1);
        }
        let mut p = TruncPoly { coeffs, cap };
        p.trim();
        p
    }

    pub fn constant(c: C) -> Self {
        TruncPoly::new(vec![c], usize::MAX)
    }

    /// The variable `t` with all degrees above `cap` discarded.
    pub fn variable(cap: usize) -> Self {
        TruncPoly::new(vec![C::zero(), C::one()], cap)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        TruncPoly::new(self.coeffs.clone(), cap.min(self.cap))
    }

    /// Drops the constant term and divides by the variable.
    pub fn shift_down(&self) -> Self {
        let cap = if self.cap == usize::MAX { usize::MAX } else { self.cap.saturating_sub(1) };
        TruncPoly::new(self.coeffs.iter().skip(1).cloned().collect(), cap)
    }

    pub fn map<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> TruncPoly<D> {
        TruncPoly::new(self.coeffs.iter().map(f).collect(), self.cap)
    }

    /// Substitutes a value for the variable (Horner).
    pub fn eval(&self, x: &C) -> C {
        self.coeffs.iter().rev().fold(C::zero(), |acc, c| acc.mul(x).add(c))
    }

    /// `log(f)` for `f` with constant term one.
    pub fn log1p_of(&self) -> crate::error::Result<Self> {
        nilpotent_log1p(&self.sub(&Self::one()))
    }
}

impl<C: Ring> Ring for TruncPoly<C> {
    fn zero() -> Self {
        TruncPoly { coeffs: Vec::new(), cap: usize::MAX }
    }
    fn one() -> Self {
        TruncPoly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k).add(&o.coeff(k))).collect();
        TruncPoly::new(coeffs, cap)
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let cap = self.cap.min(o.cap);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return TruncPoly { coeffs: Vec::new(), cap };
        }
        let top = (self.coeffs.len() + o.coeffs.len() - 2).min(cap);
        let mut coeffs = vec![C::zero(); top + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > top {
                break;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j > top {
                    break;
                }
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        TruncPoly::new(coeffs, cap)
    }
    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }
    fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }
    /// Inverse when the constant term is a unit and the cap is finite
    /// (or the polynomial is constant).
    fn try_inv(&self) -> Option<Self> {
        let c0inv = self.coeff(0).try_inv()?;
        let tail = self.sub(&TruncPoly::constant(self.coeff(0))).map(|c| c.mul(&c0inv));
        if tail.is_zero() {
            return Some(TruncPoly::constant(c0inv));
        }
        if self.cap == usize::MAX {
            return None;
        }
        let neg = tail.neg();
        let mut acc = Self::one();
        let mut power = Self::one();
        for _ in 0..=self.cap {
            power = power.mul(&neg);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Some(acc.map(|c| c.mul(&c0inv)))
    }
    fn from_rational(r: &Rational) -> Self {
        TruncPoly::constant(C::from_rational(r))
    }
}

impl TruncPoly<num_complex::Complex64> {
    pub fn scale_c(&self, k: num_complex::Complex64) -> Self {
        self.map(|c| c * k)
    }
}

impl<C: ImagUnit> ImagUnit for TruncPoly<C> {
    fn imag_unit() -> Self {
        TruncPoly::constant(C::imag_unit())
    }
}

impl<C: Ring> fmt::Debug for TruncPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncPoly{:?}", self.coeffs)?;
        if self.cap != usize::MAX {
            write!(f, "+O(t^{})", self.cap + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{inv_factorial, nilpotent_exp, rat};

    #[test]
    fn inverse_of_one_minus_t() {
        let p = TruncPoly::<Rational>::new(vec![rat(1, 1), rat(-1, 1)], 5);
        let inv = p.try_inv().unwrap();
        assert_eq!(inv.coeffs(), &vec![rat(1, 1); 6][..]);
        assert_eq!(p.mul(&inv), TruncPoly::one().with_cap(5));
    }

    #[test]
    fn exp_of_variable_is_taylor_series() {
        let t = TruncPoly::<Rational>::variable(6);
        let e = nilpotent_exp(&t).unwrap();
        for k in 0..=6 {
            assert_eq!(e.coeff(k), inv_factorial(k as u32));
        }
        assert_eq!(e.log1p_of().unwrap(), t);
    }

    #[test]
    fn shift_down_divides_by_variable() {
        let p = TruncPoly::<Rational>::new(vec![rat(0, 1), rat(2, 1), rat(3, 1)], 3);
        let s = p.shift_down();
        assert_eq!(s.coeffs(), &[rat(2, 1), rat(3, 1)]);
        assert_eq!(s.cap(), 2);
    }
}
