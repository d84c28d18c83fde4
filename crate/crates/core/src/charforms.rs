//! Characteristic forms in Chern-class generators: power sums, Adams
//! characters, exterior and symmetric power series, the Todd form.
//!
//! Roots are normalized (`x̂ = 2πi·x`), so every coefficient is rational.
//! [`CharRing`] builds the constrained ring used by the genus: no `c1`
//! generators, `c2(W)` identified with `c2(T)`, optional E8 power-sum
//! generators, and the weight-0 variable `u`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{power_sums_from_elementary, Generator, GradedPoly, PolyRing};
use crate::ring::{inv_factorial, nilpotent_exp, rat, rat_int, Rational, Ring};
use crate::trunc::TruncPoly;

/// Where a family's invariants come from.
#[derive(Clone, Debug)]
enum Invariants {
    /// `c_1..c_rank`.
    Chern(Vec<GradedPoly>),
    /// `p_1, p_2, ...` given directly (E8 families).
    PowerSums(Vec<GradedPoly>),
}

/// A bundle described through its formal roots.
#[derive(Clone, Debug)]
pub struct RootFamily {
    name: String,
    rank: u32,
    ring: Arc<PolyRing>,
    invariants: Invariants,
}

impl RootFamily {
    /// `chern[k-1] = c_k` for `k = 1..=rank`; missing entries are zero.
    pub fn from_chern(name: impl Into<String>, rank: u32, ring: &Arc<PolyRing>, chern: Vec<GradedPoly>) -> Self {
        RootFamily { name: name.into(), rank, ring: ring.clone(), invariants: Invariants::Chern(chern) }
    }

    /// `power_sums[k-1] = p_k`; missing entries are zero.
    pub fn from_power_sums(
        name: impl Into<String>,
        rank: u32,
        ring: &Arc<PolyRing>,
        power_sums: Vec<GradedPoly>,
    ) -> Self {
        RootFamily { name: name.into(), rank, ring: ring.clone(), invariants: Invariants::PowerSums(power_sums) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    /// Largest `k` for which `p_k` (degree `2k`) can be nonzero.
    pub fn max_power_index(&self) -> usize {
        (self.ring.cap() / 2) as usize
    }

    fn constant(&self, r: Rational) -> GradedPoly {
        GradedPoly::constant_in(&self.ring, r)
    }
}

/// `[p_1, ..., p_kmax]`. Beyond the rank the Newton recursion runs with
/// `e_k = 0`; terms above the cap vanish by truncation.
pub fn power_sums(family: &RootFamily, k_max: usize) -> Vec<GradedPoly> {
    match &family.invariants {
        Invariants::Chern(c) => {
            let mut e: Vec<GradedPoly> = c.iter().take(family.rank as usize).cloned().collect();
            e.resize(family.rank as usize, GradedPoly::zero_in(&family.ring));
            power_sums_from_elementary(&e, k_max)
        }
        Invariants::PowerSums(p) => {
            (1..=k_max).map(|k| p.get(k - 1).cloned().unwrap_or_else(|| GradedPoly::zero_in(&family.ring))).collect()
        }
    }
}

/// `ch ψ^m(E) = rank + Σ_k m^k p_k / k!`; the dual family uses `(-m)^k`.
pub fn adams_ch(family: &RootFamily, m: i64, dual: bool) -> GradedPoly {
    let kmax = family.max_power_index();
    let p = power_sums(family, kmax);
    let m = if dual { -m } else { m };
    let mut acc = family.constant(rat_int(family.rank as i64));
    let mut mk = rat_int(1);
    for (k, pk) in p.iter().enumerate() {
        mk *= rat_int(m);
        acc = acc.add(&pk.scale(&(&mk * inv_factorial(k as u32 + 1))));
    }
    acc
}

/// `Λ_t(E) = Σ_ρ t^ρ ch Λ^ρ(E)` as an exact polynomial in `t` of degree at
/// most the rank, built as `exp(Σ_m (-1)^(m-1) t^m/m · ψ^m)`.
pub fn lambda_series_ch(family: &RootFamily, dual: bool) -> Result<TruncPoly<GradedPoly>> {
    let top = family.rank as usize + 1;
    let mut log = TruncPoly::<GradedPoly>::new(Vec::new(), top);
    for m in 1..=top {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        let mut coeffs = vec![GradedPoly::zero(); m + 1];
        coeffs[m] = adams_ch(family, m as i64, dual).scale(&rat(sign, m as i64));
        log = log.add(&TruncPoly::new(coeffs, top));
    }
    let series = nilpotent_exp(&log)?;
    if !series.coeff(top).is_zero() {
        return Err(Error::Consistency(format!(
            "exterior powers of {} do not stop at the rank {}",
            family.name, family.rank
        )));
    }
    Ok(TruncPoly::new(series.coeffs().to_vec(), usize::MAX))
}

/// `S_t(E) = 1/Λ_{-t}(E) = exp(Σ_m t^m/m · ψ^m)` through `t^t_cap`.
pub fn symmetric_series_ch(family: &RootFamily, dual: bool, t_cap: usize) -> Result<TruncPoly<GradedPoly>> {
    let mut log = TruncPoly::<GradedPoly>::new(Vec::new(), t_cap);
    for m in 1..=t_cap {
        let mut coeffs = vec![GradedPoly::zero(); m + 1];
        coeffs[m] = adams_ch(family, m as i64, dual).scale(&rat(1, m as i64));
        log = log.add(&TruncPoly::new(coeffs, t_cap));
    }
    nilpotent_exp(&log)
}

/// Taylor coefficients `a_1..a_kmax` of `log(x / (1 - e^(-x)))`.
pub fn todd_log_coefficients(k_max: usize) -> Result<Vec<Rational>> {
    // (1 - e^(-x))/x = Σ (-1)^k x^k / (k+1)!
    let f = TruncPoly::<Rational>::new(
        (0..=k_max).map(|k| inv_factorial(k as u32 + 1) * rat_int(if k % 2 == 0 { 1 } else { -1 })).collect(),
        k_max,
    );
    let log = f.log1p_of()?;
    Ok((1..=k_max).map(|k| -log.coeff(k)).collect())
}

/// `Td = ∏ x̂/(1 - e^(-x̂)) = exp(Σ_k a_k p_k)`.
pub fn todd_form(family: &RootFamily) -> Result<GradedPoly> {
    let kmax = family.max_power_index();
    let a = todd_log_coefficients(kmax.max(1))?;
    let p = power_sums(family, kmax);
    let mut log = GradedPoly::zero_in(&family.ring);
    for (ak, pk) in a.iter().zip(&p) {
        log = log.add(&pk.scale(ak));
    }
    nilpotent_exp(&log)
}

/// `Σ_ρ (-1)^ρ weight(ρ) ch Λ^ρ(E)` with `weight` given by its coefficients
/// in `ρ` (constant term first).
pub fn weighted_wedge_sum(family: &RootFamily, dual: bool, weight: &[Rational]) -> Result<GradedPoly> {
    let lambda = lambda_series_ch(family, dual)?;
    let mut acc = GradedPoly::zero_in(&family.ring);
    for (rho, c) in lambda.coeffs().iter().enumerate() {
        let r = rat_int(rho as i64);
        let w = weight.iter().rev().fold(rat_int(0), |acc, k| acc * &r + k);
        let sign = if rho % 2 == 0 { w } else { -w };
        acc = acc.add(&c.scale(&sign));
    }
    Ok(acc)
}

/// `(ρ - l/2)^n` as coefficients in `ρ`.
pub fn centered_power(l: u32, n: u32) -> Vec<Rational> {
    let shift = rat(-(l as i64), 2);
    let mut out = vec![rat_int(1)];
    for _ in 0..n {
        let mut next = vec![rat_int(0); out.len() + 1];
        for (i, c) in out.iter().enumerate() {
            next[i + 1] += c;
            next[i] += c * &shift;
        }
        out = next;
    }
    out
}

/// The degree-`k` homogeneous slice.
pub fn degree_component(p: &GradedPoly, k: u32) -> GradedPoly {
    p.degree_component(k)
}

/// Names of the generators in a [`CharRing`].
pub mod names {
    pub const C2: &str = "c2";
    pub const U: &str = "u";
    pub fn tangent(k: u32) -> String {
        format!("c{k}")
    }
    pub fn vector(k: u32) -> String {
        format!("w{k}")
    }
    /// `P2, P4, P6` for the first E8 family, `Q2, Q4, Q6` for the second.
    pub fn e8(family: usize, m: u32) -> String {
        let letter = ["P", "Q"][family];
        format!("{letter}{}", 2 * m)
    }
}

/// Ring with the structural constraints `c1(T) = c1(W) = 0` and
/// `c2(W) = c2(T)`, degree cap `2d`, and `u^u_order = 0`.
///
/// `c2` exists only when `d ≥ 2` and `l ≥ 2`: a bundle of rank below two has
/// `c2(W) = 0`, and the identification then forces `c2(T) = 0`.
#[derive(Clone, Debug)]
pub struct CharRing {
    ring: Arc<PolyRing>,
    d: u32,
    l: u32,
    u_order: u32,
    tangent: RootFamily,
    vector: RootFamily,
    e8: Vec<RootFamily>,
}

impl CharRing {
    pub fn new(d: u32, l: u32, e8_families: usize, u_order: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Usage("d must be at least 1".into()));
        }
        if e8_families > 2 {
            return Err(Error::Usage("at most two E8 families".into()));
        }
        if u_order == 0 {
            return Err(Error::Usage("u_order must be at least 1".into()));
        }
        let cap = 2 * d;
        let mut gens = Vec::new();
        let has_c2 = d >= 2 && l >= 2;
        if has_c2 {
            gens.push(Generator::new(names::C2, 4));
        }
        for k in 3..=d {
            gens.push(Generator::new(names::tangent(k), 2 * k));
        }
        for k in 3..=d.min(l) {
            gens.push(Generator::new(names::vector(k), 2 * k));
        }
        for fam in 0..e8_families {
            for m in 1..=3u32 {
                if 4 * m <= cap {
                    gens.push(Generator::new(names::e8(fam, m), 4 * m));
                }
            }
        }
        gens.push(Generator::nilpotent(names::U, 0, u_order - 1));
        let ring = PolyRing::new(gens, cap)?;
        let var = |name: &str| GradedPoly::var(&ring, name).unwrap_or_else(|_| GradedPoly::zero_in(&ring));
        let c2 = var(names::C2);
        let mut tangent_chern = vec![GradedPoly::zero_in(&ring), c2.clone()];
        for k in 3..=d {
            tangent_chern.push(var(&names::tangent(k)));
        }
        let mut vector_chern = vec![GradedPoly::zero_in(&ring), if l >= 2 { c2 } else { GradedPoly::zero_in(&ring) }];
        for k in 3..=l {
            vector_chern.push(var(&names::vector(k)));
        }
        let tangent = RootFamily::from_chern("T", d, &ring, tangent_chern);
        let vector = RootFamily::from_chern("W", l, &ring, vector_chern);
        let e8 = (0..e8_families)
            .map(|fam| {
                let mut p = Vec::new();
                for k in 1..=(cap / 2) {
                    p.push(if k % 2 == 0 { var(&names::e8(fam, k / 2)) } else { GradedPoly::zero_in(&ring) });
                }
                RootFamily::from_power_sums(if fam == 0 { "E8a" } else { "E8b" }, 8, &ring, p)
            })
            .collect();
        Ok(CharRing { ring, d, l, u_order, tangent, vector, e8 })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn u_order(&self) -> u32 {
        self.u_order
    }

    pub fn cap(&self) -> u32 {
        self.ring.cap()
    }

    pub fn tangent(&self) -> &RootFamily {
        &self.tangent
    }

    pub fn vector(&self) -> &RootFamily {
        &self.vector
    }

    pub fn e8(&self) -> &[RootFamily] {
        &self.e8
    }

    /// The named generator, or zero if the ring does not carry it.
    pub fn var(&self, name: &str) -> GradedPoly {
        GradedPoly::var(&self.ring, name).unwrap_or_else(|_| GradedPoly::zero_in(&self.ring))
    }

    pub fn u(&self) -> GradedPoly {
        self.var(names::U)
    }

    pub fn c2(&self) -> GradedPoly {
        self.var(names::C2)
    }

    /// `c2(𝒲) = -30 P2` for E8 family `fam`.
    pub fn e8_c2(&self, fam: usize) -> GradedPoly {
        self.var(&names::e8(fam, 1)).scale(&rat_int(-30))
    }

    pub fn constant(&self, r: Rational) -> GradedPoly {
        GradedPoly::constant_in(&self.ring, r)
    }

    /// Index of the `u` generator.
    pub fn u_index(&self) -> usize {
        self.ring.index(names::U).expect("u is always present")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free ring in `c1..cn` and a root ring in `x1..xn` (plus `t`-free).
    struct Oracle {
        chern: Arc<PolyRing>,
        roots: Arc<PolyRing>,
        n: usize,
    }

    impl Oracle {
        fn new(n: usize, cap: u32) -> Self {
            let chern =
                PolyRing::new((1..=n).map(|k| Generator::new(format!("c{k}"), 2 * k as u32)).collect(), cap).unwrap();
            let roots = PolyRing::new((1..=n).map(|k| Generator::new(format!("x{k}"), 2)).collect(), cap).unwrap();
            Oracle { chern, roots, n }
        }

        fn family(&self) -> RootFamily {
            let c = (0..self.n).map(|k| GradedPoly::gen(&self.chern, k)).collect();
            RootFamily::from_chern("E", self.n as u32, &self.chern, c)
        }

        fn root(&self, i: usize) -> GradedPoly {
            GradedPoly::gen(&self.roots, i)
        }

        fn reduce(&self, p: &GradedPoly) -> GradedPoly {
            let idx: Vec<usize> = (0..self.n).collect();
            let e: Vec<GradedPoly> = (0..self.n).map(|k| GradedPoly::gen(&self.chern, k)).collect();
            if p.ring().is_none() {
                return GradedPoly::constant_in(&self.chern, p.constant_term());
            }
            p.symmetric_reduce(&idx, &self.chern, &e, &[]).unwrap()
        }

        fn exp_root(&self, i: usize, m: i64) -> GradedPoly {
            nilpotent_exp(&self.root(i).scale(&rat_int(m))).unwrap()
        }
    }

    fn chern_var(o: &Oracle, k: usize) -> GradedPoly {
        GradedPoly::gen(&o.chern, k - 1)
    }

    #[test]
    fn newton_low_order() {
        let o = Oracle::new(3, 6);
        let p = power_sums(&o.family(), 3);
        let (c1, c2, c3) = (chern_var(&o, 1), chern_var(&o, 2), chern_var(&o, 3));
        assert_eq!(p[0], c1);
        assert_eq!(p[1], c1.mul(&c1).sub(&c2.scale(&rat_int(2))));
        let expected_p3 = c1.pow(3).sub(&c1.mul(&c2).scale(&rat_int(3))).add(&c3.scale(&rat_int(3)));
        assert_eq!(p[2], expected_p3);
        let single = Oracle::new(1, 6);
        assert_eq!(power_sums(&single.family(), 3)[2], chern_var(&single, 1).pow(3));
    }

    #[test]
    fn adams_matches_roots() {
        for n in 1..=3 {
            let o = Oracle::new(n, 2 * n as u32);
            for m in [-2i64, -1, 1, 2, 3] {
                for dual in [false, true] {
                    let sign = if dual { -m } else { m };
                    let literal = (0..n).fold(GradedPoly::zero(), |acc, i| acc.add(&o.exp_root(i, sign)));
                    assert_eq!(adams_ch(&o.family(), m, dual), o.reduce(&literal), "n={n} m={m} dual={dual}");
                }
            }
        }
        let o = Oracle::new(2, 4);
        let fam = o.family();
        assert_eq!(adams_ch(&fam, 1, false).degree_component(0), GradedPoly::constant_in(&o.chern, rat_int(2)));
        assert_eq!(adams_ch(&fam, 1, true).degree_component(2), chern_var(&o, 1).neg());
        assert_eq!(adams_ch(&fam, 2, false).degree_component(4), power_sums(&fam, 2)[1].scale(&rat_int(2)));
    }

    #[test]
    fn lambda_matches_roots() {
        for n in 0..=3usize {
            let o = Oracle::new(n.max(1), 2 * n.max(1) as u32);
            let fam = if n == 0 { RootFamily::from_chern("E", 0, &o.chern, vec![]) } else { o.family() };
            for dual in [false, true] {
                let lam = lambda_series_ch(&fam, dual).unwrap();
                assert!(lam.degree().unwrap() <= n);
                // ∏ (1 + t e^(±x_i)) coefficient by coefficient
                let mut literal = vec![GradedPoly::one()];
                for i in 0..n {
                    let e = o.exp_root(i, if dual { -1 } else { 1 });
                    let mut next = literal.clone();
                    next.push(GradedPoly::zero());
                    for k in 1..next.len() {
                        next[k] = next[k].add(&literal[k - 1].mul(&e));
                    }
                    literal = next;
                }
                for (k, c) in literal.iter().enumerate() {
                    assert_eq!(lam.coeff(k), o.reduce(c), "n={n} dual={dual} t^{k}");
                }
                assert_eq!(lam.coeff(1), adams_ch(&fam, 1, dual));
            }
        }
    }

    #[test]
    fn symmetric_series_inverts_lambda() {
        let o = Oracle::new(2, 4);
        let fam = o.family();
        let s = symmetric_series_ch(&fam, false, 4).unwrap();
        let lam = lambda_series_ch(&fam, false).unwrap();
        let minus_t = TruncPoly::new(
            lam.coeffs().iter().enumerate().map(|(k, c)| if k % 2 == 1 { c.neg() } else { c.clone() }).collect(),
            4,
        );
        assert_eq!(s.mul(&minus_t), TruncPoly::one().with_cap(4));
        assert_eq!(s.coeff(1), adams_ch(&fam, 1, false));
        let rank_zero = RootFamily::from_chern("E", 0, &o.chern, vec![]);
        assert_eq!(symmetric_series_ch(&rank_zero, false, 3).unwrap().coeffs(), &[GradedPoly::one()]);
        // rank 1: 1/(1 - t e^x)
        let single = Oracle::new(1, 4);
        let s1 = symmetric_series_ch(&single.family(), false, 3).unwrap();
        for k in 0..=3 {
            assert_eq!(s1.coeff(k), single.reduce(&single.exp_root(0, k as i64)));
        }
    }

    #[test]
    fn todd_matches_roots() {
        let a = todd_log_coefficients(4).unwrap();
        assert_eq!(a[0], rat(1, 2));
        assert_eq!(a[1], rat(-1, 24));
        for n in 1..=3 {
            let o = Oracle::new(n, 2 * n as u32);
            // x/(1-e^-x) as a Taylor series, evaluated at each root
            let taylor = TruncPoly::<Rational>::new(
                (0..=n).map(|k| inv_factorial(k as u32 + 1) * rat_int(if k % 2 == 0 { 1 } else { -1 })).collect(),
                n,
            )
            .try_inv()
            .unwrap();
            let literal = (0..n).fold(GradedPoly::one(), |acc, i| {
                let x = o.root(i);
                let f = taylor
                    .coeffs()
                    .iter()
                    .enumerate()
                    .fold(GradedPoly::zero(), |s, (k, c)| s.add(&x.pow(k as u32).scale(c)));
                acc.mul(&f)
            });
            let td = todd_form(&o.family()).unwrap();
            assert_eq!(td, o.reduce(&literal), "n={n}");
            assert_eq!(td.degree_component(2), chern_var(&o, 1).scale(&rat(1, 2)));
            if n >= 2 {
                let c1 = chern_var(&o, 1);
                assert_eq!(td.degree_component(4), c1.mul(&c1).add(&chern_var(&o, 2)).scale(&rat(1, 12)));
            }
            assert_eq!(td.degree_component(0), GradedPoly::constant_in(&o.chern, rat_int(1)));
        }
    }

    #[test]
    fn wedge_sums() {
        let o = Oracle::new(2, 8);
        let fam = o.family();
        let plain = weighted_wedge_sum(&fam, true, &[rat_int(1)]).unwrap();
        let literal = (0..2).fold(GradedPoly::one(), |acc, i| acc.mul(&GradedPoly::one().sub(&o.exp_root(i, -1))));
        assert_eq!(plain, o.reduce(&literal));
        assert!(plain.degree_component(2).is_zero());
        assert!(!plain.degree_component(4).is_zero());

        let single = Oracle::new(1, 4);
        let got = weighted_wedge_sum(&single.family(), true, &centered_power(1, 1)).unwrap();
        // ρ=0 contributes -1/2, ρ=1 contributes (-1)·(1/2)·e^-w
        let expected = single.exp_root(0, -1).add(&GradedPoly::one()).scale(&rat(-1, 2));
        assert_eq!(got, single.reduce(&expected));

        let empty = RootFamily::from_chern("E", 0, &o.chern, vec![]);
        assert!(weighted_wedge_sum(&empty, true, &centered_power(0, 1)).unwrap().is_zero());
        assert_eq!(centered_power(2, 2), vec![rat_int(1), rat_int(-2), rat_int(1)]);
    }

    #[test]
    fn constrained_ring_layout() {
        let r = CharRing::new(3, 2, 1, 5).unwrap();
        let names: Vec<&str> = r.ring().gens().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, vec!["c2", "c3", "P2", "u"]);
        let pw = power_sums(r.vector(), 3);
        assert!(pw[0].is_zero());
        assert_eq!(pw[1], r.c2().scale(&rat_int(-2)));
        assert_eq!(power_sums(r.tangent(), 2)[1], pw[1]);
        assert!(power_sums(&r.e8()[0], 3)[0].is_zero());
        assert_eq!(r.e8_c2(0), r.var("P2").scale(&rat_int(-30)));
        assert!(r.u().pow(5).is_zero() && !r.u().pow(4).is_zero());
        assert!(CharRing::new(2, 1, 0, 5).unwrap().c2().is_zero());
        let full = CharRing::new(7, 4, 2, 1).unwrap();
        let names: Vec<&str> = full.ring().gens().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(
            names,
            vec!["c2", "c3", "c4", "c5", "c6", "c7", "w3", "w4", "P2", "P4", "P6", "Q2", "Q4", "Q6", "u"]
        );
    }

    #[test]
    fn outputs_are_even() {
        let r = CharRing::new(4, 3, 1, 3).unwrap();
        let td = todd_form(r.tangent()).unwrap();
        let lam = lambda_series_ch(r.vector(), true).unwrap();
        for p in std::iter::once(&td).chain(lam.coeffs()) {
            for (m, _) in p.terms() {
                assert_eq!(r.ring().weight(m) % 2, 0);
            }
        }
    }
}
