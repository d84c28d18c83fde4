//! Eisenstein series, the `G4^a G6^b` monomial bases of level-one modular
//! forms, and exact decomposition of q-expansions onto those bases.

use std::collections::BTreeSet;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{GradedPoly, Monomial};
use crate::qseries::{Exp24, Q24Series};
use crate::ring::{rat, Rational, Ring};

pub type RatSeries = Q24Series<Rational>;

/// Weight of a modular form for the full modular group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModularWeight(pub i64);

impl ModularWeight {
    /// `(a, b)` with `4a + 6b = w`, ordered by `a` descending.
    pub fn monomials(self) -> Vec<(u32, u32)> {
        let w = self.0;
        if w < 0 {
            return Vec::new();
        }
        let mut out: Vec<(u32, u32)> =
            (0..=w / 4).filter(|a| (w - 4 * a) % 6 == 0).map(|a| (a as u32, ((w - 4 * a) / 6) as u32)).collect();
        out.sort_by(|x, y| y.0.cmp(&x.0));
        out
    }

    pub fn dimension(self) -> usize {
        self.monomials().len()
    }
}

/// Normalized `G4^a G6^b`, constant term one.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub a: u32,
    pub b: u32,
    pub series: RatSeries,
}

/// `σ_k(n) = Σ_{t | n} t^k`.
pub fn divisor_sigma(k: u32, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::Domain("divisor sum of 0".into()));
    }
    let mut acc = BigInt::from(0);
    let mut t = 1u64;
    while t * t <= n {
        if n % t == 0 {
            acc += BigInt::from(t).pow(k);
            let other = n / t;
            if other != t {
                acc += BigInt::from(other).pow(k);
            }
        }
        t += 1;
    }
    Ok(acc)
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernoulli number `B_n` (with `B_1 = -1/2`), cached.
pub fn bernoulli(n: usize) -> Rational {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut b = cache.lock().expect("bernoulli cache poisoned");
    while b.len() <= n {
        let m = b.len();
        let mut s = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += Rational::from_integer(binomial(m as u64 + 1, j as u64)) * bj;
        }
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b[n].clone()
}

/// Raw `G_{2k} = -B_{2k}/(4k) + Σ_{n≥1} σ_{2k-1}(n) q^n` through `q^order`.
pub fn eisenstein_g(weight: u32, order: i64) -> Result<RatSeries> {
    if weight < 2 || weight % 2 == 1 {
        return Err(Error::Usage(format!("Eisenstein series needs an even weight ≥ 2, got {weight}")));
    }
    let constant = -bernoulli(weight as usize) / Rational::from_integer(BigInt::from(2 * weight));
    let mut s = RatSeries::constant(constant, Exp24::int(order + 1));
    for n in 1..=order {
        s.add_term(Exp24::int(n), Rational::from_integer(divisor_sigma(weight - 1, n as u64)?));
    }
    Ok(s)
}

/// `E2 = -24 G2 = 1 - 24q - 72q^2 - ...`.
pub fn e2(order: i64) -> RatSeries {
    eisenstein_g(2, order).expect("weight 2 is valid").scale(&rat(-24, 1))
}

/// Divides a series by its constant term.
pub fn normalized(s: &RatSeries) -> Result<RatSeries> {
    let c = s.coeff(Exp24::ZERO)?;
    let inv = Ring::try_inv(&c).ok_or_else(|| Error::Domain("normalizing a series with zero constant term".into()))?;
    Ok(s.scale(&inv))
}

/// Normalized `G4` and `G6` through `q^order`.
pub fn g4_g6(order: i64) -> (RatSeries, RatSeries) {
    let g4 = normalized(&eisenstein_g(4, order).expect("valid")).expect("nonzero constant");
    let g6 = normalized(&eisenstein_g(6, order).expect("valid")).expect("nonzero constant");
    (g4, g6)
}

pub fn weight_basis(w: ModularWeight, order: i64) -> Vec<BasisElement> {
    let (g4, g6) = g4_g6(order);
    w.monomials().into_iter().map(|(a, b)| BasisElement { a, b, series: g4.pow(a).mul(&g6.pow(b)) }).collect()
}

/// Exact solve of a square rational system by Gaussian elimination.
pub fn solve_rational(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>) -> Result<Vec<Rational>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|r| !m[*r][col].is_zero())
            .ok_or_else(|| Error::Consistency("singular basis matrix".into()))?;
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = m[col][col].recip();
        for c in col..n {
            m[col][c] = &m[col][c] * &inv;
        }
        rhs[col] = &rhs[col] * &inv;
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
                let v = &rhs[col] * &f;
                rhs[r] -= v;
            }
        }
    }
    Ok(rhs)
}

/// Result of projecting a series onto a weight basis.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub weight: ModularWeight,
    /// `(a, b, λ)` for each basis element `G4^a G6^b`.
    pub coefficients: Vec<(u32, u32, GradedPoly)>,
    /// `f - Σ λ_i basis_i` through `q^order`; zero certifies membership.
    pub residual: Q24Series<GradedPoly>,
}

/// Solves for `λ` from the first `dim` coefficients, one rational system per
/// generator monomial, and reports the residual through `q^order`.
pub fn decompose(f: &Q24Series<GradedPoly>, w: ModularWeight, order: i64) -> Result<Decomposition> {
    let basis = weight_basis(w, order);
    let dim = basis.len();
    if f.trunc() <= Exp24::int(order) || order + 1 < dim as i64 {
        return Err(Error::InsufficientOrder(format!(
            "decomposition at weight {} needs coefficients through q^{}",
            w.0,
            order.max(dim as i64 - 1)
        )));
    }
    let head: Vec<GradedPoly> = f.int_coeffs(dim as i64 - 1)?;
    let monomials: BTreeSet<Monomial> = head.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    let matrix: Vec<Vec<Rational>> =
        (0..dim).map(|i| basis.iter().map(|b| b.series.coeff_int(i as i64).expect("basis order")).collect()).collect();
    let mut lambdas: Vec<GradedPoly> = vec![GradedPoly::zero(); dim];
    let ring = head.iter().find_map(|p| p.ring().cloned());
    for m in &monomials {
        let rhs: Vec<Rational> = head.iter().map(|p| p.coeff(m)).collect();
        let sol = solve_rational(matrix.clone(), rhs)?;
        for (j, x) in sol.into_iter().enumerate() {
            if let Some(r) = &ring {
                lambdas[j] = lambdas[j].add(&GradedPoly::from_terms(r, [(m.clone(), x)]));
            } else {
                lambdas[j] = lambdas[j].add(&GradedPoly::constant(x));
            }
        }
    }
    let bound = Exp24::int(order + 1);
    let mut residual = f.truncated(bound);
    for (b, lam) in basis.iter().zip(&lambdas) {
        let lifted: Q24Series<GradedPoly> = b.series.map_coeffs(|c| lam.scale(c));
        residual = residual.sub(&lifted);
    }
    Ok(Decomposition {
        weight: w,
        coefficients: basis.iter().zip(lambdas).map(|(b, l)| (b.a, b.b, l)).collect(),
        residual: residual.truncated(bound),
    })
}
