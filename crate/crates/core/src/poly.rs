//! Sparse multivariate polynomials in weighted generators, truncated above a
//! total weight.
//!
//! A [`PolyRing`] fixes generator names, their cohomological degrees and the
//! weight cap; a generator may additionally carry a maximal power, which is
//! how the weight-0 variable `u` is kept nilpotent. [`MPoly`] values hold an
//! `Arc` to their ring; constants may omit it so that `zero`/`one` need no
//! context.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{ImagUnit, Rational, Ring};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    /// Cohomological degree (`c_k` has degree `2k`).
    pub degree: u32,
    pub max_power: Option<u32>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator { name: name.into(), degree, max_power: None }
    }

    /// A generator whose powers above `max_power` vanish.
    pub fn nilpotent(name: impl Into<String>, degree: u32, max_power: u32) -> Self {
        Generator { name: name.into(), degree, max_power: Some(max_power) }
    }
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    gens: Vec<Generator>,
    cap: u32,
}

impl PolyRing {
    pub fn new(gens: Vec<Generator>, cap: u32) -> Result<Arc<Self>> {
        for (i, g) in gens.iter().enumerate() {
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Usage(format!("duplicate generator name {}", g.name)));
            }
            if g.degree == 0 && g.max_power.is_none() {
                return Err(Error::Usage(format!("degree-0 generator {} needs a maximal power", g.name)));
            }
            if g.degree > u8::MAX as u32 || g.max_power.is_some_and(|m| m > u8::MAX as u32) {
                return Err(Error::Usage(format!("generator {} exceeds exponent range", g.name)));
            }
        }
        Ok(Arc::new(PolyRing { gens, cap }))
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn weight(&self, m: &Monomial) -> u32 {
        m.0.iter().zip(&self.gens).map(|(e, g)| *e as u32 * g.degree).sum()
    }

    fn admits(&self, m: &Monomial) -> bool {
        self.weight(m) <= self.cap
            && m.0.iter().zip(&self.gens).all(|(e, g)| g.max_power.map_or(true, |mp| *e as u32 <= mp))
    }
}

/// Exponent vector with trailing zeros removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(pub Vec<u8>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize, e: u8) -> Self {
        let mut v = vec![0u8; i + 1];
        v[i] = e;
        Monomial(v).normalized()
    }

    fn normalized(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn exp(&self, i: usize) -> u8 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (long, short) = if self.0.len() >= o.0.len() { (self, o) } else { (o, self) };
        let mut v = long.0.clone();
        for (a, b) in v.iter_mut().zip(&short.0) {
            *a += *b;
        }
        Monomial(v)
    }

    /// Same monomial with generator `i` removed.
    pub fn without(&self, i: usize) -> Monomial {
        let mut v = self.0.clone();
        if i < v.len() {
            v[i] = 0;
        }
        Monomial(v).normalized()
    }
}

#[derive(Clone)]
pub struct MPoly<C> {
    ring: Option<Arc<PolyRing>>,
    terms: BTreeMap<Monomial, C>,
}

/// Exact rational polynomial in characteristic-class generators.
pub type GradedPoly = MPoly<Rational>;

fn join_rings(a: &Option<Arc<PolyRing>>, b: &Option<Arc<PolyRing>>) -> Option<Arc<PolyRing>> {
    match (a, b) {
        (Some(x), Some(y)) => {
            assert!(Arc::ptr_eq(x, y) || x == y, "polynomials from different rings were combined");
            Some(x.clone())
        }
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (None, None) => None,
    }
}

impl<C: Ring> MPoly<C> {
    pub fn zero_in(ring: &Arc<PolyRing>) -> Self {
        MPoly { ring: Some(ring.clone()), terms: BTreeMap::new() }
    }

    pub fn constant_in(ring: &Arc<PolyRing>, c: C) -> Self {
        let mut p = Self::zero_in(ring);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn constant(c: C) -> Self {
        let mut p = MPoly { ring: None, terms: BTreeMap::new() };
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    /// The generator with index `i`.
    pub fn gen(ring: &Arc<PolyRing>, i: usize) -> Self {
        let mut p = Self::zero_in(ring);
        p.add_term(Monomial::var(i, 1), C::one());
        p
    }

    /// The generator called `name`.
    pub fn var(ring: &Arc<PolyRing>, name: &str) -> Result<Self> {
        let i = ring.index(name).ok_or_else(|| Error::Usage(format!("no generator named {name}")))?;
        Ok(Self::gen(ring, i))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(ring: &Arc<PolyRing>, terms: I) -> Self {
        let mut p = Self::zero_in(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> Option<&Arc<PolyRing>> {
        self.ring.as_ref()
    }

    /// Adds `c·m`, discarding monomials beyond the ring's caps.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        let m = m.normalized();
        if let Some(r) = &self.ring {
            if !r.admits(&m) {
                return;
            }
        } else {
            assert!(m.is_one(), "non-constant monomial without a ring");
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one())
    }

    fn weight_of(&self, m: &Monomial) -> u32 {
        self.ring.as_ref().map_or(0, |r| r.weight(m))
    }

    /// The homogeneous slice of cohomological degree `k`.
    pub fn degree_component(&self, k: u32) -> Self {
        MPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| self.weight_of(m) == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest degree present, or `None` for zero.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| self.weight_of(m)).max()
    }

    /// Coefficient of `g_i^n`, as a polynomial in the remaining generators.
    pub fn coeff_of_power(&self, i: usize, n: u8) -> Self {
        let mut out = MPoly { ring: self.ring.clone(), terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            if m.exp(i) == n {
                out.terms.insert(m.without(i), c.clone());
            }
        }
        out
    }

    pub fn map_coeffs<D: Ring, F: Fn(&C) -> D>(&self, f: F) -> MPoly<D> {
        let mut out = MPoly { ring: self.ring.clone(), terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let d = f(c);
            if !d.is_zero() {
                out.terms.insert(m.clone(), d);
            }
        }
        out
    }

    pub fn try_map_coeffs<D: Ring, F: Fn(&C) -> Result<D>>(&self, f: F) -> Result<MPoly<D>> {
        let mut out = MPoly { ring: self.ring.clone(), terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            let d = f(c)?;
            if !d.is_zero() {
                out.terms.insert(m.clone(), d);
            }
        }
        Ok(out)
    }

    /// Ring homomorphism sending generator `i` to `images[i]`, with
    /// coefficients converted by `conv`.
    pub fn substitute<D: Ring, F: Fn(&C) -> D>(
        &self,
        target: &Arc<PolyRing>,
        images: &[MPoly<D>],
        conv: F,
    ) -> MPoly<D> {
        let mut powers: Vec<Vec<MPoly<D>>> =
            images.iter().map(|p| vec![MPoly::constant_in(target, D::one()), p.clone()]).collect();
        let mut out = MPoly::zero_in(target);
        for (m, c) in &self.terms {
            let mut term = MPoly::constant_in(target, conv(c));
            for (i, e) in m.0.iter().enumerate() {
                let e = *e as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][e]);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Re-expresses a polynomial symmetric in the generators `roots` through
    /// the elementary symmetric functions, whose images in `target` are
    /// `elementary[k-1]`. Every other generator is mapped by `spectators`
    /// (`(source index, image)` pairs). Fails when the input is not symmetric.
    pub fn symmetric_reduce(
        &self,
        roots: &[usize],
        target: &Arc<PolyRing>,
        elementary: &[MPoly<C>],
        spectators: &[(usize, MPoly<C>)],
    ) -> Result<MPoly<C>> {
        let source =
            self.ring.clone().ok_or_else(|| Error::Usage("symmetric reduction of a constant needs no roots".into()))?;
        let n = roots.len();
        let mut e_src: Vec<MPoly<C>> = Vec::with_capacity(n);
        let mut partial = vec![MPoly::constant_in(&source, C::one())];
        for &r in roots {
            let x = MPoly::gen(&source, r);
            let mut next = partial.clone();
            next.push(MPoly::zero_in(&source));
            for k in 1..next.len() {
                next[k] = next[k].add(&partial[k - 1].mul(&x));
            }
            partial = next;
        }
        for k in 1..=n {
            e_src.push(partial[k].clone());
        }
        let zero_target = MPoly::<C>::zero_in(target);
        let elem = |k: usize| -> MPoly<C> { elementary.get(k - 1).cloned().unwrap_or_else(|| zero_target.clone()) };
        let spectator_image = |m: &Monomial| -> MPoly<C> {
            let mut img = MPoly::constant_in(target, C::one());
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 || roots.contains(&i) {
                    continue;
                }
                let base = spectators
                    .iter()
                    .find(|(j, _)| *j == i)
                    .map(|(_, p)| p.clone())
                    .unwrap_or_else(|| zero_target.clone());
                img = img.mul(&base.pow(*e as u32));
            }
            img
        };
        let root_part = |m: &Monomial| -> Vec<u8> { roots.iter().map(|r| m.exp(*r)).collect() };

        let mut rest = self.clone();
        let mut out = zero_target.clone();
        let mut guard = 0usize;
        while let Some(lead) = rest.terms.keys().map(root_part).max() {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Consistency("symmetric reduction did not terminate".into()));
            }
            if lead.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::Domain(format!(
                    "polynomial is not symmetric in the roots (leading exponents {lead:?})"
                )));
            }
            let mut e_product_src = MPoly::constant_in(&source, C::one());
            let mut e_product_tgt = MPoly::constant_in(target, C::one());
            for k in 1..=n {
                let next = if k < n { lead[k] } else { 0 };
                let mult = (lead[k - 1] - next) as u32;
                if mult > 0 {
                    e_product_src = e_product_src.mul(&e_src[k - 1].pow(mult));
                    e_product_tgt = e_product_tgt.mul(&elem(k).pow(mult));
                }
            }
            let group: Vec<(Monomial, C)> =
                rest.terms.iter().filter(|(m, _)| root_part(m) == lead).map(|(m, c)| (m.clone(), c.clone())).collect();
            for (m, c) in group {
                let mut spect = m.clone();
                for r in roots {
                    spect = spect.without(*r);
                }
                let mut spect_src = MPoly::zero_in(&source);
                spect_src.add_term(spect.clone(), c.clone());
                rest = rest.sub(&spect_src.mul(&e_product_src));
                out = out.add(&spectator_image(&spect).mul(&e_product_tgt).map_coeffs(|x| x.mul(&c)));
            }
        }
        Ok(out)
    }
}

impl<C: Ring> PartialEq for MPoly<C> {
    fn eq(&self, o: &Self) -> bool {
        self.terms == o.terms
    }
}

impl<C: Ring> Ring for MPoly<C> {
    fn zero() -> Self {
        MPoly { ring: None, terms: BTreeMap::new() }
    }
    fn one() -> Self {
        MPoly::constant(C::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let ring = join_rings(&self.ring, &o.ring);
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = MPoly { ring, terms: big.terms.clone() };
        for (m, c) in &small.terms {
            match out.terms.get_mut(m) {
                Some(old) => {
                    let s = old.add(c);
                    if s.is_zero() {
                        out.terms.remove(m);
                    } else {
                        *old = s;
                    }
                }
                None => {
                    out.terms.insert(m.clone(), c.clone());
                }
            }
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let ring = join_rings(&self.ring, &o.ring);
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        let weighted: Vec<(&Monomial, &C, u32)> = o.terms.iter().map(|(m, c)| (m, c, o.weight_of(m))).collect();
        for (ma, ca) in &self.terms {
            let wa = self.weight_of(ma);
            for (mb, cb, wb) in &weighted {
                let m = ma.mul(mb);
                if let Some(r) = &ring {
                    if wa + wb > r.cap || !r.admits(&m) {
                        continue;
                    }
                }
                let p = ca.mul(cb);
                match acc.get_mut(&m) {
                    Some(old) => *old = old.add(&p),
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        MPoly { ring, terms: acc }
    }
    fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }
    fn scale(&self, r: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(r))
    }
    /// Inverse of `unit + nilpotent`; every non-constant monomial is
    /// nilpotent because of the weight cap and the power limits.
    fn try_inv(&self) -> Option<Self> {
        let c0inv = self.constant_term().try_inv()?;
        let mut tail = self.clone();
        tail.terms.remove(&Monomial::one());
        let tail = tail.map_coeffs(|c| c.mul(&c0inv)).neg();
        let mut acc = Self::one();
        let mut power = Self::one();
        for _ in 0..4096 {
            power = power.mul(&tail);
            if power.is_zero() {
                return Some(acc.map_coeffs(|c| c.mul(&c0inv)));
            }
            acc = acc.add(&power);
        }
        None
    }
    fn from_rational(r: &Rational) -> Self {
        MPoly::constant(C::from_rational(r))
    }
}

impl<C: ImagUnit> ImagUnit for MPoly<C> {
    fn imag_unit() -> Self {
        MPoly::constant(C::imag_unit())
    }
}

impl<C: Ring> MPoly<C> {
    fn render(&self, f: &mut fmt::Formatter<'_>, coeff: impl Fn(&C) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by_key(|(m, _)| (self.weight_of(m), (*m).clone()));
        for (n, (m, c)) in ordered.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (i, e) in m.0.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let name = self.ring.as_ref().map_or("?", |r| r.gens[i].name.as_str());
                if *e == 1 {
                    factors.push(name.to_string());
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            if factors.is_empty() {
                write!(f, "{}", coeff(c))?;
            } else {
                write!(f, "{}*{}", coeff(c), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<C: Ring + fmt::Display> fmt::Display for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, |c| c.to_string())
    }
}

impl<C: Ring> fmt::Debug for MPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, |c| format!("{c:?}"))
    }
}

/// Newton–Girard: power sums `p_1..p_kmax` from elementary symmetric
/// functions `e_1..e_n` (with `e_k = 0` for `k > n`).
pub fn power_sums_from_elementary<R: Ring>(e: &[R], kmax: usize) -> Vec<R> {
    let ek = |k: usize| -> R {
        if k >= 1 && k <= e.len() {
            e[k - 1].clone()
        } else {
            R::zero()
        }
    };
    let mut p: Vec<R> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        let mut acc = ek(k).scale(&Rational::from_integer((k as i64 * if k % 2 == 1 { 1 } else { -1 }).into()));
        for i in 1..k {
            let term = ek(i).mul(&p[k - i - 1]);
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        p.push(acc);
    }
    p
}

/// Newton–Girard in the other direction: `e_1..e_kmax` from `p_1..`.
pub fn elementary_from_power_sums<R: Ring>(p: &[R], kmax: usize) -> Vec<R> {
    let pk = |k: usize| -> R { p.get(k - 1).cloned().unwrap_or_else(R::zero) };
    let mut e: Vec<R> = vec![R::one()];
    for k in 1..=kmax {
        let mut acc = R::zero();
        for i in 1..=k {
            let term = e[k - i].mul(&pk(i));
            acc = if i % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        e.push(acc.scale(&Rational::new(1.into(), (k as i64).into())));
    }
    e.remove(0);
    e
}
