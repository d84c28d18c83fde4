//! The four Jacobi theta functions
//!
//! ```text
//! θ (τ,z) = 2 q^(1/8) sin(πz) ∏ (1-q^j)(1-y q^j)(1-y^-1 q^j)
//! θ1(τ,z) = 2 q^(1/8) cos(πz) ∏ (1-q^j)(1+y q^j)(1+y^-1 q^j)
//! θ2(τ,z) =                   ∏ (1-q^j)(1-y q^(j-1/2))(1-y^-1 q^(j-1/2))
//! θ3(τ,z) =                   ∏ (1-q^j)(1+y q^(j-1/2))(1+y^-1 q^(j-1/2))
//! ```
//!
//! with `y = e^v`, `v = 2πi z`, in three modes: formal q-series with a
//! nilpotent ring element as argument, two-variable `(q, y)` series, and
//! complex evaluation (optionally on ε-jets).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{Exp24, Q24Series};
use crate::report::{Entry, VerificationReport};
use crate::ring::{nilpotent_exp, rat, GaussRat, ImagUnit, Rational, Ring, NILPOTENCY_PROBE};
use crate::trunc::TruncPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    Theta,
    Theta1,
    Theta2,
    Theta3,
}

impl ThetaKind {
    pub const ALL: [ThetaKind; 4] = [ThetaKind::Theta, ThetaKind::Theta1, ThetaKind::Theta2, ThetaKind::Theta3];

    pub fn is_odd(self) -> bool {
        self == ThetaKind::Theta
    }

    /// `+1` for the `(1 + y q^k)` kinds, `-1` for `(1 - y q^k)`.
    fn sign(self) -> i64 {
        match self {
            ThetaKind::Theta | ThetaKind::Theta2 => -1,
            ThetaKind::Theta1 | ThetaKind::Theta3 => 1,
        }
    }

    /// Whether the y-factors carry `q^(j-1/2)` instead of `q^j`.
    fn half_shifted(self) -> bool {
        matches!(self, ThetaKind::Theta2 | ThetaKind::Theta3)
    }

    pub fn name(self) -> &'static str {
        match self {
            ThetaKind::Theta => "theta",
            ThetaKind::Theta1 => "theta1",
            ThetaKind::Theta2 => "theta2",
            ThetaKind::Theta3 => "theta3",
        }
    }
}

/// A nilpotent argument `v` together with the `N` for which `v^(N+1) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentArg<R> {
    value: R,
    order: u32,
}

impl<R: Ring> NilpotentArg<R> {
    pub fn new(value: R) -> Result<Self> {
        let mut power = R::one();
        for n in 0..NILPOTENCY_PROBE {
            power = power.mul(&value);
            if power.is_zero() {
                return Ok(NilpotentArg { value, order: n });
            }
        }
        Err(Error::Domain("theta argument is not nilpotent".into()))
    }

    pub fn value(&self) -> &R {
        &self.value
    }

    /// Largest `N` with `v^N ≠ 0`.
    pub fn order(&self) -> u32 {
        self.order
    }
}

fn exp_pair<R: Ring>(v: &R) -> Result<(R, R)> {
    Ok((nilpotent_exp(v)?, nilpotent_exp(&v.neg())?))
}

/// `∏_{j} (1-q^j)(1 ± e^v q^k)(1 ± e^-v q^k)` through `q^order`, with `k = j`
/// or `j - 1/2` by kind.
fn theta_product<R: Ring>(kind: ThetaKind, ev: &R, emv: &R, order: i64) -> Q24Series<R> {
    let trunc = Exp24::int(order + 1);
    let s = R::from_int(kind.sign());
    let mut acc = Q24Series::one(trunc);
    for j in 1..=order + 1 {
        let k = if kind.half_shifted() { Exp24(24 * j - 12) } else { Exp24::int(j) };
        let factor = |c: &R| Q24Series::from_terms([(Exp24::ZERO, R::one()), (k, s.mul(c))], trunc);
        acc = acc
            .mul(&Q24Series::from_terms([(Exp24::ZERO, R::one()), (Exp24::int(j), R::one().neg())], trunc))
            .mul(&factor(ev))
            .mul(&factor(emv));
    }
    acc
}

/// Formal expansion of a theta function at a nilpotent argument.
pub fn theta_of<R: ImagUnit>(kind: ThetaKind, v: &NilpotentArg<R>, q_order: i64) -> Result<Q24Series<R>> {
    if kind.is_odd() {
        let half = v.value().scale(&rat(1, 2));
        let (eh, emh) = exp_pair(&half)?;
        let pre = R::imag_unit().neg().mul(&eh.sub(&emh));
        let (ev, emv) = (eh.mul(&eh), emh.mul(&emh));
        return Ok(theta_product(kind, &ev, &emv, q_order).mul_coeff(&pre).shift(Exp24(3)));
    }
    theta_even_of(kind, v, q_order)
}

/// Expansion of `θ1`, `θ2`, `θ3` at a nilpotent argument; these never need
/// the imaginary unit, so any coefficient ring works.
pub fn theta_even_of<R: Ring>(kind: ThetaKind, v: &NilpotentArg<R>, q_order: i64) -> Result<Q24Series<R>> {
    let half = v.value().scale(&rat(1, 2));
    let (eh, emh) = exp_pair(&half)?;
    let (ev, emv) = (eh.mul(&eh), emh.mul(&emh));
    let product = theta_product(kind, &ev, &emv, q_order);
    match kind {
        ThetaKind::Theta => Err(Error::Usage("θ needs a ring with an imaginary unit".into())),
        ThetaKind::Theta1 => Ok(product.mul_coeff(&eh.add(&emh)).shift(Exp24(3))),
        ThetaKind::Theta2 | ThetaKind::Theta3 => Ok(product),
    }
}

/// `2 sinh(v/2) / v = Σ v^(2j) / (4^j (2j+1)!)`.
pub fn sinhc_half<R: Ring>(v: &NilpotentArg<R>) -> R {
    let v2 = v.value().mul(v.value());
    let mut acc = R::one();
    let mut term = R::one();
    let mut j = 0i64;
    loop {
        j += 1;
        term = term.mul(&v2).scale(&rat(1, 4 * (2 * j) * (2 * j + 1)));
        if term.is_zero() {
            return acc;
        }
        acc = acc.add(&term);
    }
}

/// `θ(τ, v) / v`, which is a unit: `-i q^(1/8) (2 sinh(v/2)/v) ∏ (...)`.
pub fn theta_over_arg<R: ImagUnit>(v: &NilpotentArg<R>, q_order: i64) -> Result<Q24Series<R>> {
    let (ev, emv) = exp_pair(v.value())?;
    let pre = R::imag_unit().neg().mul(&sinhc_half(v));
    Ok(theta_product(ThetaKind::Theta, &ev, &emv, q_order).mul_coeff(&pre).shift(Exp24(3)))
}

/// Laurent polynomial in `y^(1/2)` with Gaussian-rational coefficients;
/// keys count half-units of the y exponent.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct YLaurent {
    terms: BTreeMap<i64, GaussRat>,
}

impl YLaurent {
    /// `c · y^(half/2)`.
    pub fn monomial(c: GaussRat, half: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half, c);
        }
        YLaurent { terms }
    }

    /// `y^(half/2)`.
    pub fn y_half(half: i64) -> Self {
        Self::monomial(GaussRat::one(), half)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &GaussRat)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, half: i64) -> GaussRat {
        self.terms.get(&half).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Largest `|exponent|` in half-units.
    pub fn span(&self) -> i64 {
        self.terms.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    /// Keeps only terms with `|y exponent| ≤ window`.
    pub fn windowed(&self, window: u32) -> Self {
        let bound = 2 * window as i64;
        YLaurent { terms: self.terms.iter().filter(|(k, _)| k.abs() <= bound).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// `z ↦ z + 1`, which sends `y^(1/2)` to `-y^(1/2)`.
    pub fn shift_z_by_one(&self) -> Self {
        YLaurent {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, if k.rem_euclid(2) == 1 { c.neg() } else { c.clone() }))
                .collect(),
        }
    }
}

impl Ring for YLaurent {
    fn zero() -> Self {
        YLaurent::default()
    }
    fn one() -> Self {
        YLaurent::y_half(0)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            let sum = terms.get(k).map_or_else(|| c.clone(), |a| a.add(c));
            if sum.is_zero() {
                terms.remove(k);
            } else {
                terms.insert(*k, sum);
            }
        }
        YLaurent { terms }
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let mut acc = YLaurent::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                acc = acc.add(&YLaurent::monomial(ca.mul(cb), ka + kb));
            }
        }
        acc
    }
    fn neg(&self) -> Self {
        YLaurent { terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }
    fn scale(&self, r: &Rational) -> Self {
        let mut out = YLaurent::zero();
        for (k, c) in &self.terms {
            out = out.add(&YLaurent::monomial(c.scale(r), *k));
        }
        out
    }
    /// Only monomials are units.
    fn try_inv(&self) -> Option<Self> {
        match self.terms.iter().next() {
            Some((k, c)) if self.terms.len() == 1 => Some(YLaurent::monomial(c.try_inv()?, -k)),
            _ => None,
        }
    }
}

impl ImagUnit for YLaurent {
    fn imag_unit() -> Self {
        YLaurent::monomial(GaussRat::i(), 0)
    }
}

/// Two-variable `(q, y)` expansion through `q^q_order`. With a window, terms
/// with `|y exponent| > window` are dropped from the result.
pub fn theta_qy_series(kind: ThetaKind, q_order: i64, y_window: Option<u32>) -> Q24Series<YLaurent> {
    let (eh, emh) = (YLaurent::y_half(1), YLaurent::y_half(-1));
    let (ev, emv) = (YLaurent::y_half(2), YLaurent::y_half(-2));
    let product = theta_product(kind, &ev, &emv, q_order);
    let full = match kind {
        ThetaKind::Theta => product.mul_coeff(&YLaurent::imag_unit().neg().mul(&eh.sub(&emh))).shift(Exp24(3)),
        ThetaKind::Theta1 => product.mul_coeff(&eh.add(&emh)).shift(Exp24(3)),
        ThetaKind::Theta2 | ThetaKind::Theta3 => product,
    };
    match y_window {
        Some(w) => full.map_coeffs(|c| c.windowed(w)),
        None => full,
    }
}

/// Substitutes `y ↦ q y` (that is, `z ↦ z + τ`) into a `(q, y)` series.
/// Terms `c q^n y^(k/2)` move to `q^(n + k/2)`; the bound moves down by the
/// most negative y exponent present.
pub fn shift_z_by_tau(s: &Q24Series<YLaurent>) -> Q24Series<YLaurent> {
    let most_negative = s.terms().flat_map(|(_, c)| c.terms().map(|(k, _)| k)).min().unwrap_or(0).min(0);
    let trunc = s.trunc() + Exp24(12 * most_negative);
    let mut out = Q24Series::zero(trunc);
    for (e, c) in s.terms() {
        for (k, coeff) in c.terms() {
            out.add_term(e + Exp24(12 * k), YLaurent::monomial(coeff.clone(), k));
        }
    }
    out
}

/// Internal order for the symbolic `z ↦ z + τ` check.
pub const LATTICE_INTERNAL_ORDER: i64 = 12;

/// Highest q-power at which the `z ↦ z + τ` substitution of a θ expansion
/// computed through `q^internal` is still exact. At order `n` the y-degree of
/// θ is at most `√(2n) + 1/2`, so unseen terms land at `q^(n - √(2n) - 1/2)`
/// or above.
pub fn lattice_shift_exact_order(internal: i64) -> i64 {
    let unseen = internal + 1;
    let drop = ((2 * unseen) as f64).sqrt().ceil() as i64 + 1;
    unseen - drop - 1
}

/// `θ(z+1) = -θ(z)` and `θ(z+τ) = -q^(-1/2) y^-1 θ(z)` as exact `(q, y)`
/// identities through `q^q_order`.
pub fn check_lattice_shifts_symbolic(q_order: i64) -> VerificationReport {
    let mut internal = LATTICE_INTERNAL_ORDER.max(q_order);
    while lattice_shift_exact_order(internal) < q_order {
        internal += 1;
    }
    let theta = theta_qy_series(ThetaKind::Theta, internal, None);
    let bound = Exp24::int(q_order + 1);
    let mut entries = Vec::new();

    let once = theta.map_coeffs(|c| c.shift_z_by_one());
    let diff = once.add(&theta).truncated(bound);
    entries.push(Entry::check("theta(z+1) = -theta(z)", diff.is_zero(), || {
        format!("first nonzero term at q^({})", diff.valuation().unwrap_or(Exp24::ZERO))
    }));
    let twice = once.map_coeffs(|c| c.shift_z_by_one());
    entries.push(Entry::check("z -> z+1 twice is the identity", twice == theta, || "series differ".into()));

    let lhs = shift_z_by_tau(&theta).truncated(bound);
    let rhs = theta.map_coeffs(|c| c.mul(&YLaurent::y_half(-2))).shift(Exp24(-12)).neg().truncated(bound);
    let shifted_ok = lhs.trunc() >= bound && rhs.trunc() >= bound;
    let mismatch = lhs.first_mismatch(&rhs);
    entries.push(Entry::check("theta(z+tau) = -q^(-1/2) y^(-1) theta(z)", shifted_ok && mismatch.is_none(), || {
        match mismatch {
            Some(e) => format!("coefficients differ at q^({e})"),
            None => format!("substituted series only known below q^({})", lhs.trunc()),
        }
    }));
    VerificationReport::from_entries("theta-lattice-shifts-symbolic", entries)
}

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

/// Number of product factors so that `|q|^n · max|y^±1| < tol/16` (with
/// `q^(n-1/2)` for the half-shifted kinds).
pub fn factor_count(kind: ThetaKind, tau: Complex64, v0: Complex64, tol: f64) -> Result<usize> {
    if tau.im <= 0.0 {
        return Err(Error::Domain(format!("Im(tau) must be positive, got {}", tau.im)));
    }
    let log_q = -2.0 * PI * tau.im;
    let log_m = v0.re.abs();
    let target = (tol / 16.0).ln() - log_m;
    let mut n = (target / log_q).ceil().max(1.0);
    if kind.half_shifted() {
        n += 0.5;
    }
    Ok(n.ceil() as usize + 1)
}

/// `exp` of a jet whose constant term need not vanish.
fn jet_exp(v: &TruncPoly<Complex64>) -> Result<TruncPoly<Complex64>> {
    let c0 = v.coeff(0);
    let tail = v.sub(&TruncPoly::constant(c0));
    Ok(nilpotent_exp(&tail)?.mul(&TruncPoly::constant(c0.exp())))
}

/// Theta evaluated on an ε-jet `v = 2πi z + O(ε)` (complex coefficients,
/// truncated in ε). The constant term may be any complex number.
pub fn theta_jet(kind: ThetaKind, tau: Complex64, v: &TruncPoly<Complex64>, tol: f64) -> Result<TruncPoly<Complex64>> {
    let n = factor_count(kind, tau, v.coeff(0), tol)?;
    let q = (TWO_PI_I * tau).exp();
    let q_half = (PI * Complex64::i() * tau).exp();
    let half = v.scale(&rat(1, 2));
    let eh = jet_exp(&half)?;
    let emh = jet_exp(&half.neg())?;
    let ev = eh.mul(&eh);
    let emv = emh.mul(&emh);
    let one = TruncPoly::<Complex64>::one();
    let s = Complex64::new(kind.sign() as f64, 0.0);
    let mut acc = one.clone();
    let mut qj = Complex64::new(1.0, 0.0);
    for _ in 1..=n {
        let qk = if kind.half_shifted() { qj * q_half } else { qj * q };
        qj *= q;
        let f = TruncPoly::constant(Complex64::new(1.0, 0.0) - qj)
            .mul(&one.add(&ev.scale_c(s * qk)))
            .mul(&one.add(&emv.scale_c(s * qk)));
        acc = acc.mul(&f);
    }
    let q_eighth = (TWO_PI_I * tau / 8.0).exp();
    Ok(match kind {
        ThetaKind::Theta => acc.mul(&eh.sub(&emh)).scale_c(-Complex64::i() * q_eighth),
        ThetaKind::Theta1 => acc.mul(&eh.add(&emh)).scale_c(q_eighth),
        ThetaKind::Theta2 | ThetaKind::Theta3 => acc,
    })
}

/// Complex value of a theta function at `(τ, z)`.
pub fn theta_numeric(kind: ThetaKind, tau: Complex64, z: Complex64, tol: f64) -> Result<Complex64> {
    let v = TruncPoly::constant(TWO_PI_I * z);
    Ok(theta_jet(kind, tau, &v, tol)?.coeff(0))
}

/// `(lhs - rhs) / max(1, |rhs|)`.
pub fn relative_residual(lhs: Complex64, rhs: Complex64) -> Complex64 {
    (lhs - rhs) / rhs.norm().max(1.0)
}

/// The T and S laws for all four kinds at one sample point.
pub fn check_modular_transforms(tau: Complex64, z: Complex64, tol: f64) -> Result<VerificationReport> {
    let eval_tol = tol * 1e-3;
    let th = |k: ThetaKind, t: Complex64, zz: Complex64| theta_numeric(k, t, zz, eval_tol);
    let i = Complex64::i();
    let eighth_turn = (PI * i / 4.0).exp();
    let tau_s = -1.0 / tau;
    if tau_s.im <= 0.0 {
        return Err(Error::Domain("S-transformed point leaves the upper half plane".into()));
    }
    // τ/i has positive real part on the upper half plane, so the principal
    // branch is the continuous one.
    let root = (tau / i).sqrt();
    assert!(root.re > 0.0);
    let gauss = (PI * i * tau * z * z).exp();
    let tz = tau * z;
    let tau_t = tau + 1.0;
    use ThetaKind::*;
    let rows: [(&str, Complex64, Complex64); 8] = [
        ("T theta", th(Theta, tau_t, z)?, eighth_turn * th(Theta, tau, z)?),
        ("T theta1", th(Theta1, tau_t, z)?, eighth_turn * th(Theta1, tau, z)?),
        ("T theta2", th(Theta2, tau_t, z)?, th(Theta3, tau, z)?),
        ("T theta3", th(Theta3, tau_t, z)?, th(Theta2, tau, z)?),
        ("S theta", th(Theta, tau_s, z)?, (1.0 / i) * root * gauss * th(Theta, tau, tz)?),
        ("S theta1", th(Theta1, tau_s, z)?, root * gauss * th(Theta2, tau, tz)?),
        ("S theta2", th(Theta2, tau_s, z)?, root * gauss * th(Theta1, tau, tz)?),
        ("S theta3", th(Theta3, tau_s, z)?, root * gauss * th(Theta3, tau, tz)?),
    ];
    let entries = rows
        .iter()
        .map(|(label, lhs, rhs)| {
            Entry::numeric(format!("{label} at tau={tau}, z={z}"), relative_residual(*lhs, *rhs), tol)
        })
        .collect();
    Ok(VerificationReport::from_entries("theta-modular-transforms", entries))
}

/// `θ(z+1) = -θ(z)` and `θ(z+τ) = -q^(-1/2) e^(-2πiz) θ(z)` numerically.
pub fn check_lattice_shifts_numeric(tau: Complex64, z: Complex64, tol: f64) -> Result<VerificationReport> {
    let eval_tol = tol * 1e-3;
    let th = |zz: Complex64| theta_numeric(ThetaKind::Theta, tau, zz, eval_tol);
    let base = th(z)?;
    let factor = -(-PI * Complex64::i() * tau).exp() * (-TWO_PI_I * z).exp();
    let entries = vec![
        Entry::numeric(format!("theta(z+1) at tau={tau}, z={z}"), relative_residual(th(z + 1.0)?, -base), tol),
        Entry::numeric(
            format!("theta(z+tau) at tau={tau}, z={z}"),
            relative_residual(th(z + tau)?, factor * base),
            tol,
        ),
    ];
    Ok(VerificationReport::from_entries("theta-lattice-shifts-numeric", entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::phi;
    use crate::ring::rat_int;

    fn gauss_int(n: i64) -> GaussRat {
        GaussRat::real(rat_int(n))
    }

    #[test]
    fn theta_vanishes_at_zero() {
        let zero = NilpotentArg::new(GaussRat::zero()).unwrap();
        assert!(theta_of(ThetaKind::Theta, &zero, 4).unwrap().is_zero());
        assert!(
            theta_numeric(ThetaKind::Theta, Complex64::i(), Complex64::new(0.0, 0.0), 1e-12).unwrap().norm() < 1e-12
        );
    }

    #[test]
    fn non_nilpotent_argument_is_refused() {
        assert!(NilpotentArg::new(rat_int(2)).is_err());
    }

    fn jet_arg(cap: usize) -> NilpotentArg<TruncPoly<GaussRat>> {
        NilpotentArg::new(TruncPoly::variable(cap)).unwrap()
    }

    #[test]
    fn derivative_at_zero_is_eta_cubed() {
        let th = theta_of(ThetaKind::Theta, &jet_arg(5), 5).unwrap();
        let linear = th.map_coeffs(|c| c.coeff(1).mul(&GaussRat::i()));
        let oracle = phi::<GaussRat>(5).pow(3).shift(Exp24(3));
        assert_eq!(linear, oracle);
    }

    #[test]
    fn parity_in_the_argument() {
        for kind in ThetaKind::ALL {
            let th = theta_of(kind, &jet_arg(6), 3).unwrap();
            for (_, c) in th.terms() {
                for (k, x) in c.coeffs().iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    assert_eq!(k % 2 == 1, kind.is_odd(), "{kind:?} has a v^{k} term");
                }
            }
        }
    }

    /// Literal product `2 q^(1/8) ∏ (1-q^j)(1+q^j)^2` multiplied out term by term.
    fn theta1_at_zero_oracle(order: usize) -> Vec<i64> {
        let mut c = vec![0i64; order + 1];
        c[0] = 2;
        for j in 1..=order {
            for (sign, reps) in [(-1i64, 1), (1, 2)] {
                for _ in 0..reps {
                    for n in (j..=order).rev() {
                        c[n] += sign * c[n - j];
                    }
                }
            }
        }
        c
    }

    #[test]
    fn theta1_at_zero_matches_product() {
        let zero = NilpotentArg::new(GaussRat::zero()).unwrap();
        let th = theta_of(ThetaKind::Theta1, &zero, 6).unwrap();
        let oracle = theta1_at_zero_oracle(6);
        for (n, c) in oracle.iter().enumerate() {
            assert_eq!(th.coeff(Exp24(24 * n as i64 + 3)).unwrap(), gauss_int(*c));
        }
    }

    #[test]
    fn over_arg_times_arg_is_theta() {
        let v = jet_arg(6);
        let lhs = theta_over_arg(&v, 4).unwrap().map_coeffs(|c| c.mul(v.value()));
        assert_eq!(lhs, theta_of(ThetaKind::Theta, &v, 4).unwrap());
    }

    #[test]
    fn qy_theta2_low_order() {
        let th = theta_qy_series(ThetaKind::Theta2, 1, Some(1));
        let y = |h: i64| YLaurent::y_half(h);
        let minus_sym = y(2).add(&y(-2)).neg();
        assert_eq!(th.coeff(Exp24::ZERO).unwrap(), YLaurent::one());
        assert_eq!(th.coeff(Exp24(12)).unwrap(), minus_sym);
        // q^1: -1 from (1-q) plus y·y^-1 from the two half-shifted factors.
        assert_eq!(th.coeff(Exp24::int(1)).unwrap(), YLaurent::zero());
    }

    #[test]
    fn qy_theta_at_y_one_vanishes() {
        let th = theta_qy_series(ThetaKind::Theta, 6, None);
        for (_, c) in th.terms() {
            let at_one = c.terms().fold(GaussRat::zero(), |acc, (_, x)| acc.add(x));
            assert!(at_one.is_zero());
        }
    }

    #[test]
    fn theta2_plus_theta3_has_integral_powers() {
        let s = theta_qy_series(ThetaKind::Theta2, 6, None).add(&theta_qy_series(ThetaKind::Theta3, 6, None));
        assert!(s.is_integral());
    }

    #[test]
    fn symbolic_lattice_shifts() {
        let r = check_lattice_shifts_symbolic(4);
        assert!(r.passed(), "{:?}", r.witness);
        assert!(lattice_shift_exact_order(LATTICE_INTERNAL_ORDER) >= 4);
    }

    #[test]
    fn numeric_lattice_shifts() {
        let r = check_lattice_shifts_numeric(Complex64::new(0.0, 2.0), Complex64::new(0.1, 0.2), 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
    }

    #[test]
    fn modular_transforms_at_i() {
        let r = check_modular_transforms(Complex64::i(), Complex64::new(0.3, 0.0), 1e-9).unwrap();
        assert!(r.passed(), "{:?}", r.entries);
    }

    #[test]
    fn numeric_evenness_and_convergence() {
        let tau = Complex64::new(0.2, 1.1);
        let z = Complex64::new(0.15, 0.05);
        let a = theta_numeric(ThetaKind::Theta1, tau, z, 1e-13).unwrap();
        let b = theta_numeric(ThetaKind::Theta1, tau, -z, 1e-13).unwrap();
        assert!((a - b).norm() < 1e-12);
        let t3 = theta_numeric(ThetaKind::Theta3, Complex64::i(), Complex64::new(0.0, 0.0), 1e-13).unwrap();
        assert!(t3.im.abs() < 1e-13);
        // doubling the factor count changes nothing
        let n = factor_count(ThetaKind::Theta3, Complex64::i(), Complex64::new(0.0, 0.0), 1e-13).unwrap();
        let q = (TWO_PI_I * Complex64::i()).exp();
        let mut p = Complex64::new(1.0, 0.0);
        for j in 1..=2 * n as i32 {
            let qh = q.powf(j as f64 - 0.5);
            p *= (1.0 - q.powi(j)) * (1.0 + qh) * (1.0 + qh);
        }
        assert!((p - t3).norm() < 1e-13);
        assert!(theta_numeric(ThetaKind::Theta, Complex64::new(1.0, -0.1), z, 1e-9).is_err());
    }

    #[test]
    fn jets_match_finite_differences() {
        let tau = Complex64::new(0.1, 0.9);
        let z0 = Complex64::new(0.12, -0.07);
        let h = 1e-5;
        for kind in ThetaKind::ALL {
            let v = TruncPoly::new(vec![TWO_PI_I * z0, Complex64::new(1.0, 0.0)], 2);
            let jet = theta_jet(kind, tau, &v, 1e-14).unwrap();
            let f = |z: Complex64| theta_numeric(kind, tau, z, 1e-14).unwrap();
            // d/dv = (1/2πi) d/dz
            let fd = (f(z0 + h) - f(z0 - h)) / (2.0 * h) / TWO_PI_I;
            assert!((jet.coeff(1) - fd).norm() < 1e-6, "{kind:?}");
            assert!((jet.coeff(0) - f(z0)).norm() < 1e-12);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn transforms_hold_at_random_points(tr in -0.5f64..0.5, ti in 0.8f64..2.0, r in 0.0f64..0.5, arg in 0.0f64..std::f64::consts::TAU) {
            let tau = Complex64::new(tr, ti);
            let z = Complex64::from_polar(r, arg);
            let m = check_modular_transforms(tau, z, 1e-9).unwrap();
            proptest::prop_assert!(m.passed(), "{:?}", m.witness);
            let s = check_lattice_shifts_numeric(tau, z, 1e-9).unwrap();
            proptest::prop_assert!(s.passed(), "{:?}", s.witness);
        }
    }
}
