//! Truncated sparse series in `q^(1/24)`.
//!
//! A [`Q24Series`] stores exponents on the fixed grid `Exp24 = num/24` and
//! carries an exclusive truncation bound: every coefficient at an exponent
//! below `trunc` is exact, nothing at or above it is known. Arithmetic never
//! widens a bound, so precision loss is always visible in the result.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{inv_factorial, nilpotent_exp, nilpotent_log1p, rat, Rational, Ring};

/// Exponent of `q` in units of 1/24.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Exp24(pub i64);

impl Exp24 {
    pub const ZERO: Exp24 = Exp24(0);
    /// Bound of an exact (untruncated) series.
    pub const INF: Exp24 = Exp24(i64::MAX);

    pub const fn new(num: i64) -> Self {
        Exp24(num)
    }

    /// The integer power `q^n`.
    pub const fn int(n: i64) -> Self {
        Exp24(24 * n)
    }

    /// `q^(num/den)`; `den` must divide 24.
    pub fn frac(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || 24 % den != 0 {
            return Err(Error::Usage(format!("exponent denominator {den} does not divide 24")));
        }
        Ok(Exp24(num * (24 / den)))
    }

    pub fn num(self) -> i64 {
        self.0
    }

    pub fn is_inf(self) -> bool {
        self.0 == i64::MAX
    }

    pub fn is_integral(self) -> bool {
        self.0 % 24 == 0
    }

    /// Integer value of an integral exponent.
    pub fn as_int(self) -> Option<i64> {
        if self.is_integral() && !self.is_inf() {
            Some(self.0 / 24)
        } else {
            None
        }
    }
}

impl Add for Exp24 {
    type Output = Exp24;
    fn add(self, o: Exp24) -> Exp24 {
        if self.is_inf() || o.is_inf() {
            Exp24::INF
        } else {
            Exp24(self.0 + o.0)
        }
    }
}

impl Sub for Exp24 {
    type Output = Exp24;
    fn sub(self, o: Exp24) -> Exp24 {
        if self.is_inf() {
            Exp24::INF
        } else {
            Exp24(self.0 - o.0)
        }
    }
}

impl Neg for Exp24 {
    type Output = Exp24;
    fn neg(self) -> Exp24 {
        Exp24(-self.0)
    }
}

impl fmt::Display for Exp24 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}/24", self.0)
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Q24Series<R> {
    terms: BTreeMap<Exp24, R>,
    trunc: Exp24,
}

impl<R: Ring> Q24Series<R> {
    /// The zero series known below `trunc`.
    pub fn zero(trunc: Exp24) -> Self {
        Q24Series { terms: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: Exp24) -> Self {
        Self::constant(R::one(), trunc)
    }

    pub fn constant(c: R, trunc: Exp24) -> Self {
        Self::monomial(c, Exp24::ZERO, trunc)
    }

    pub fn monomial(c: R, e: Exp24, trunc: Exp24) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(e, c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (Exp24, R)>>(terms: I, trunc: Exp24) -> Self {
        let mut s = Self::zero(trunc);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Series with integer exponents `q^0, q^1, ...` taken from `coeffs`.
    pub fn from_int_coeffs<I: IntoIterator<Item = R>>(coeffs: I, trunc: Exp24) -> Self {
        Self::from_terms(coeffs.into_iter().enumerate().map(|(n, c)| (Exp24::int(n as i64), c)), trunc)
    }

    /// Adds `c·q^e`, silently dropping it at or above the bound.
    pub fn add_term(&mut self, e: Exp24, c: R) {
        if e >= self.trunc || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = old.add(&c);
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn trunc(&self) -> Exp24 {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exp24, &R)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at `e`; ring zero when absent. Asking at or above the
    /// bound is an error because the value is unknown.
    pub fn coeff(&self, e: Exp24) -> Result<R> {
        if e >= self.trunc {
            return Err(Error::InsufficientOrder(format!(
                "coefficient at q^({e}) requested from a series truncated at q^({})",
                self.trunc
            )));
        }
        Ok(self.terms.get(&e).cloned().unwrap_or_else(R::zero))
    }

    /// Coefficient of the integer power `q^n`.
    pub fn coeff_int(&self, n: i64) -> Result<R> {
        self.coeff(Exp24::int(n))
    }

    /// Coefficients of `q^0 ..= q^order`.
    pub fn int_coeffs(&self, order: i64) -> Result<Vec<R>> {
        (0..=order).map(|n| self.coeff_int(n)).collect()
    }

    pub fn valuation(&self) -> Option<Exp24> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(Exp24, &R)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// True when every stored exponent is an integer power of `q`.
    pub fn is_integral(&self) -> bool {
        self.terms.keys().all(|e| e.is_integral())
    }

    /// Lowers the bound to `min(self.trunc, t)`.
    pub fn truncated(&self, t: Exp24) -> Self {
        let trunc = self.trunc.min(t);
        Q24Series { terms: self.terms.range(..trunc).map(|(e, c)| (*e, c.clone())).collect(), trunc }
    }

    /// Multiplication by the exact monomial `q^e`.
    pub fn shift(&self, e: Exp24) -> Self {
        Q24Series { terms: self.terms.iter().map(|(k, c)| (*k + e, c.clone())).collect(), trunc: self.trunc + e }
    }

    pub fn map_coeffs<S: Ring, F: Fn(&R) -> S>(&self, f: F) -> Q24Series<S> {
        let mut out = Q24Series::zero(self.trunc);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn try_map_coeffs<S: Ring, F: Fn(&R) -> Result<S>>(&self, f: F) -> Result<Q24Series<S>> {
        let mut out = Q24Series::zero(self.trunc);
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Ok(out)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.truncated(o.trunc);
        for (e, c) in o.terms.range(..out.trunc) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Q24Series { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(), trunc: self.trunc }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }

    pub fn mul_coeff(&self, k: &R) -> Self {
        self.map_coeffs(|c| c.mul(k))
    }

    /// Product with the bound `min(Ta + min(vb,0), Tb + min(va,0))`, which is
    /// `min(Ta, Tb)` for series without negative exponents.
    pub fn mul(&self, o: &Self) -> Self {
        let va = self.valuation().map_or(0, |v| v.0.min(0));
        let vb = o.valuation().map_or(0, |v| v.0.min(0));
        let trunc = (self.trunc + Exp24(vb)).min(o.trunc + Exp24(va));
        let mut acc: BTreeMap<Exp24, R> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = *ea + *eb;
                if e >= trunc {
                    break;
                }
                let p = ca.mul(cb);
                match acc.get_mut(&e) {
                    Some(old) => *old = old.add(&p),
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Q24Series { terms: acc, trunc }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(Exp24::INF);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k == 0 {
            acc.truncated(self.trunc)
        } else {
            acc
        }
    }

    /// Integer power, negative exponents through [`Self::invert`].
    pub fn pow_i(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.invert()?.pow((-k) as u32))
        }
    }

    fn constant_and_tail(&self) -> (R, Self) {
        let c0 = self.terms.get(&Exp24::ZERO).cloned().unwrap_or_else(R::zero);
        let mut tail = self.clone();
        tail.terms.remove(&Exp24::ZERO);
        (c0, tail)
    }

    /// `Σ tail^k · weight(k)` for a tail of strictly positive valuation.
    fn power_sum<F: Fn(u32) -> Rational>(tail: &Self, trunc: Exp24, weight: F) -> Result<Self> {
        let mut acc = Self::one(trunc);
        if tail.is_zero() {
            return Ok(acc);
        }
        if trunc.is_inf() {
            return Err(Error::Domain("power series of an untruncated series does not terminate".into()));
        }
        let mut power = Self::one(trunc);
        for k in 1u32.. {
            power = power.mul(tail);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&weight(k)));
        }
        Ok(acc)
    }

    /// `exp(f)` for `f` with nilpotent constant term and no negative exponents.
    pub fn exp(&self) -> Result<Self> {
        if self.valuation().is_some_and(|v| v < Exp24::ZERO) {
            return Err(Error::Domain("exp of a series with negative exponents".into()));
        }
        let (c0, tail) = self.constant_and_tail();
        let head = nilpotent_exp(&c0)?;
        let body = Self::power_sum(&tail, self.trunc, inv_factorial);
        Ok(body?.mul_coeff(&head))
    }

    /// `log(f)` for `f` whose constant term is `1 + nilpotent`.
    pub fn log(&self) -> Result<Self> {
        if self.valuation() != Some(Exp24::ZERO) {
            return Err(Error::Domain("log needs a unit constant term and no negative exponents".into()));
        }
        let c0 = self.terms[&Exp24::ZERO].clone();
        let head = nilpotent_log1p(&c0.sub(&R::one()))?;
        let c0inv = c0.try_inv().ok_or_else(|| Error::NotInvertible(format!("{c0:?}")))?;
        let normalized = self.mul_coeff(&c0inv);
        let (_, tail) = normalized.constant_and_tail();
        let body = Self::power_sum(&tail, self.trunc, |k| rat(if k % 2 == 1 { 1 } else { -1 }, k as i64))?;
        let mut out = body.sub(&Self::one(self.trunc));
        out.add_term(Exp24::ZERO, head);
        Ok(out)
    }

    /// Multiplicative inverse. A leading monomial `c·q^a` is inverted by an
    /// exponent shift, so the result is known below `trunc - 2a`.
    pub fn invert(&self) -> Result<Self> {
        let (a, c) = self.leading().ok_or_else(|| Error::NotInvertible("zero series".into()))?;
        let cinv = c.try_inv().ok_or_else(|| Error::NotInvertible(format!("{c:?} at q^({a})")))?;
        let normalized = self.shift(-a).mul_coeff(&cinv);
        let (_, tail) = normalized.constant_and_tail();
        let geometric = Self::power_sum(&tail.neg(), normalized.trunc, |_| rat(1, 1))?;
        Ok(geometric.mul_coeff(&cinv).shift(-a))
    }

    /// First exponent below both bounds where the two series differ.
    pub fn first_mismatch(&self, o: &Self) -> Option<Exp24> {
        let bound = self.trunc.min(o.trunc);
        let keys: std::collections::BTreeSet<Exp24> =
            self.terms.range(..bound).chain(o.terms.range(..bound)).map(|(e, _)| *e).collect();
        keys.into_iter().find(|e| self.terms.get(e) != o.terms.get(e))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Q24Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *e == Exp24::ZERO {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*q^({}/24)", e.0)?;
            }
        }
        Ok(())
    }
}

/// `φ(q) = ∏_{j≥1} (1 - q^j)` through `q^order`.
pub fn phi<R: Ring>(order: i64) -> Q24Series<R> {
    let trunc = Exp24::int(order + 1);
    let mut acc = Q24Series::one(trunc);
    for j in 1..=order {
        let factor = Q24Series::from_terms([(Exp24::ZERO, R::one()), (Exp24::int(j), R::one().neg())], trunc);
        acc = acc.mul(&factor);
    }
    acc
}

/// `φ(q)^k` for any integer `k`, through `q^order`.
pub fn phi_pow<R: Ring>(k: i64, order: i64) -> Result<Q24Series<R>> {
    phi::<R>(order).pow_i(k)
}

/// `η = q^(1/24) φ`.
pub fn eta<R: Ring>(order: i64) -> Q24Series<R> {
    phi::<R>(order).shift(Exp24(1))
}

/// `η^k = q^(k/24) φ^k`.
pub fn eta_pow<R: Ring>(k: i64, order: i64) -> Result<Q24Series<R>> {
    Ok(phi_pow::<R>(k, order)?.shift(Exp24(k)))
}

/// `η^3 = q^(1/8) φ^3`.
pub fn eta_cubed<R: Ring>(order: i64) -> Q24Series<R> {
    phi::<R>(order).pow(3).shift(Exp24(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat_int, GaussRat};
    use proptest::prelude::*;

    type QS = Q24Series<Rational>;

    fn ints(s: &QS, order: i64) -> Vec<i64> {
        s.int_coeffs(order).unwrap().iter().map(|c| c.to_integer().try_into().unwrap()).collect()
    }

    /// Dense integer expansion of `∏_{j≤n} (1-q^j)^k` by repeated convolution.
    fn brute_phi_pow(k: i64, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n + 1];
        v[0] = 1;
        for j in 1..=n {
            for _ in 0..k.abs() {
                if k > 0 {
                    for i in (j..=n).rev() {
                        v[i] -= v[i - j];
                    }
                } else {
                    for i in j..=n {
                        v[i] += v[i - j];
                    }
                }
            }
        }
        v
    }

    /// Euler's pentagonal number theorem.
    fn pentagonal(n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n + 1];
        for m in -(n as i64)..=(n as i64) {
            let e = m * (3 * m - 1) / 2;
            if (0..=n as i64).contains(&e) {
                v[e as usize] += if m % 2 == 0 { 1 } else { -1 };
            }
        }
        v
    }

    #[test]
    fn difference_of_squares() {
        let t = Exp24::int(10);
        let a = QS::from_int_coeffs([rat_int(1), rat_int(-1)], t);
        let b = QS::from_int_coeffs([rat_int(1), rat_int(1)], t);
        assert_eq!(ints(&a.mul(&b), 3), vec![1, 0, -1, 0]);
    }

    #[test]
    fn phi_cubed_matches_brute_force() {
        let s = phi::<Rational>(7).pow(3);
        assert_eq!(ints(&s, 7), brute_phi_pow(3, 7));
        assert_eq!(ints(&s, 7), vec![1, -3, 0, 5, 0, 0, -7, 0]);
    }

    #[test]
    fn phi_matches_pentagonal_numbers() {
        assert_eq!(ints(&phi::<Rational>(30), 30), pentagonal(30));
        assert_eq!(ints(&phi::<Rational>(3), 3), vec![1, -1, -1, 0]);
    }

    #[test]
    fn phi_powers_of_eight() {
        assert_eq!(ints(&phi_pow::<Rational>(8, 2).unwrap(), 2), vec![1, -8, 20]);
        assert_eq!(ints(&phi_pow::<Rational>(-8, 2).unwrap(), 2), brute_phi_pow(-8, 2));
        assert_eq!(ints(&phi_pow::<Rational>(-8, 2).unwrap(), 2), vec![1, 8, 44]);
    }

    #[test]
    fn eta_cubed_has_eighth_power_base() {
        let s = eta_cubed::<Rational>(4);
        assert_eq!(s.valuation(), Some(Exp24(3)));
        assert_eq!(s.coeff(Exp24(3)).unwrap(), rat_int(1));
        assert_eq!(Exp24(3) + Exp24(3), Exp24(6));
    }

    #[test]
    fn invert_handles_leading_shift() {
        let t = Exp24::int(6);
        let f = QS::from_terms([(Exp24(12), rat_int(1)), (Exp24(36), rat_int(1))], t);
        let g = f.invert().unwrap();
        assert_eq!(g.trunc(), Exp24(144 - 24));
        assert_eq!(g.coeff(Exp24(-12)).unwrap(), rat_int(1));
        assert_eq!(g.coeff(Exp24(12)).unwrap(), rat_int(-1));
        assert_eq!(g.coeff(Exp24(36)).unwrap(), rat_int(1));
        let geometric = QS::from_int_coeffs([rat_int(1), rat_int(-1)], Exp24::int(5)).invert().unwrap();
        assert_eq!(ints(&geometric, 4), vec![1, 1, 1, 1, 1]);
    }

    #[test]
    fn exp_and_log_basics() {
        let t = Exp24::int(5);
        assert_eq!(QS::zero(t).exp().unwrap(), QS::one(t));
        let f = QS::from_int_coeffs([rat_int(1), rat_int(-1)], t);
        assert_eq!(f.log().unwrap().exp().unwrap(), f);
        assert!(QS::constant(rat(1, 2), t).exp().is_err());
    }

    #[test]
    fn exp_over_dual_numbers() {
        use crate::trunc::TruncPoly;
        let eps = TruncPoly::<Rational>::variable(1);
        let s = Q24Series::monomial(eps.clone(), Exp24::int(1), Exp24::int(4));
        let e = s.exp().unwrap();
        let expected = Q24Series::from_terms([(Exp24::ZERO, TruncPoly::one()), (Exp24::int(1), eps)], Exp24::int(4));
        assert_eq!(e, expected);
    }

    #[test]
    fn display_format() {
        let s = QS::from_terms([(Exp24::ZERO, rat(1, 2)), (Exp24(3), rat(-3, 1))], Exp24::int(2));
        assert_eq!(s.to_string(), "1/2 + -3*q^(3/24)");
        let g = Q24Series::<GaussRat>::monomial(GaussRat::i(), Exp24(6), Exp24::int(1));
        assert_eq!(g.to_string(), "1*i*q^(6/24)");
    }

    #[test]
    fn coefficient_above_bound_is_refused() {
        let s = phi::<Rational>(2);
        assert!(s.coeff_int(3).is_err());
        assert!(s.coeff_int(2).is_ok());
    }

    fn arb_series(min_exp: i64) -> impl Strategy<Value = QS> {
        (prop::collection::vec((min_exp..72i64, -20i64..20, 1i64..4), 0..6), 48i64..96)
            .prop_map(|(terms, t)| QS::from_terms(terms.into_iter().map(|(e, n, d)| (Exp24(e), rat(n, d))), Exp24(t)))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(0), b in arb_series(0), c in arb_series(0)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn truncation_monotone(a in arb_series(0), b in arb_series(0), cut in 0i64..48) {
            let low = Exp24(cut);
            prop_assert_eq!(a.mul(&b).truncated(low), a.truncated(low).mul(&b.truncated(low)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn exp_log_round_trip(a in arb_series(1)) {
            let e = a.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), a);
        }

        #[test]
        fn invert_round_trip(a in arb_series(1), lead in 1i64..5) {
            let f = a.add(&QS::constant(rat(lead, 3), Exp24::INF));
            let g = f.invert().unwrap();
            prop_assert_eq!(f.mul(&g), QS::one(f.trunc()));
        }
    }
}
