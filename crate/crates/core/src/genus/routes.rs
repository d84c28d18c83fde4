//! The genus by its definition (exterior and symmetric power series of the
//! bundles) and by the theta-product formula over explicit Chern roots.

use std::sync::Arc;

use super::{GenusInstance, USeries};
use crate::charforms::{adams_ch, lambda_series_ch, names, todd_form, CharRing};
use crate::e8char::{e8_theta_combo, e8_theta_combo_scratch, GradedSeries};
use crate::eisenstein::{e2, eisenstein_g};
use crate::error::{Error, Result};
use crate::poly::{Generator, GradedPoly, MPoly, PolyRing};
use crate::qseries::{eta_pow, Exp24, Q24Series};
use crate::report::{Entry, VerificationReport};
use crate::ring::{nilpotent_exp, rat, rat_int, GaussRat, Rational, Ring};
use crate::theta::{theta_of, theta_over_arg, NilpotentArg, ThetaKind};

type GaussPoly = MPoly<GaussRat>;
type GaussSeries = Q24Series<GaussPoly>;

fn lift(ring: &CharRing, s: &Q24Series<Rational>) -> GradedSeries {
    s.map_coeffs(|c| ring.constant(c.clone()))
}

fn to_gauss(p: &GradedPoly) -> GaussPoly {
    p.map_coeffs(|c| GaussRat::real(c.clone()))
}

/// `ch E(M, W, τ, z)`: `φ^(2(d-l)) y^(-l/2) ⊗_m Λ_{-y q^(m-1)}(W*) Λ_{-y⁻¹ q^m}(W) S_{q^m}(T*) S_{q^m}(T)`
/// with `y = e^u`.
///
/// The `m = 1` factor of `Λ(W*)` is kept exact; the remainder is
/// `exp(Σ_n qⁿ Σ_{k|n} B_k / k)` with
/// `B_k = -e^{ku} ψᵏW* - e^{-ku} ψᵏW + ψᵏT* + ψᵏT - 2(d-l)`.
pub(super) fn bundle_e_ch_in(ring: &CharRing, q_order: i64) -> Result<GradedSeries> {
    let trunc = Exp24::int(q_order + 1);
    let d = ring.d() as i64;
    let l = ring.l() as i64;
    let u = ring.u();
    let lambda = lambda_series_ch(ring.vector(), true)?;
    let mut head = GradedPoly::zero_in(ring.ring());
    for (rho, c) in lambda.coeffs().iter().enumerate() {
        let shift = nilpotent_exp(&u.scale(&rat(2 * rho as i64 - l, 2)))?;
        let term = shift.mul(c);
        head = if rho % 2 == 0 { head.add(&term) } else { head.sub(&term) };
    }
    let mut log = GradedSeries::zero(trunc);
    for k in 1..=q_order {
        let eku = nilpotent_exp(&u.scale(&rat_int(k)))?;
        let emku = nilpotent_exp(&u.scale(&rat_int(-k)))?;
        let b = eku
            .mul(&adams_ch(ring.vector(), k, true))
            .add(&emku.mul(&adams_ch(ring.vector(), k, false)))
            .neg()
            .add(&adams_ch(ring.tangent(), k, true))
            .add(&adams_ch(ring.tangent(), k, false))
            .sub(&ring.constant(rat_int(2 * (d - l))))
            .scale(&rat(1, k));
        let mut n = k;
        while n <= q_order {
            log.add_term(Exp24::int(n), b.clone());
            n += k;
        }
    }
    Ok(log.exp()?.mul_coeff(&head))
}

pub fn bundle_e_ch(inst: &GenusInstance) -> Result<USeries> {
    let ring = inst.char_ring()?;
    Ok(USeries::new(bundle_e_ch_in(&ring, inst.q_order)?, &ring))
}

/// `Σ c2(𝒲)` over the E8 families, with `c2(𝒲) = -30·P2`.
fn gauge_c2(ring: &CharRing) -> GradedPoly {
    (0..ring.e8().len()).fold(GradedPoly::zero_in(ring.ring()), |acc, fam| acc.add(&ring.e8_c2(fam)))
}

/// `exp(E2(τ)/24 · Σc2(𝒲)/30)`.
fn e2_prefactor(ring: &CharRing, q_order: i64) -> Result<GradedSeries> {
    let c2 = gauge_c2(ring).scale(&rat(1, 720));
    lift(ring, &e2(q_order)).mul_coeff(&c2).exp()
}

fn top_degree(ring: &CharRing, s: &GradedSeries) -> GradedSeries {
    s.map_coeffs(|c| c.degree_component(ring.cap()))
}

pub(super) fn ell_definition_route_in(ring: &CharRing, q_order: i64) -> Result<GradedSeries> {
    let mut acc = bundle_e_ch_in(ring, q_order)?;
    acc = acc.mul_coeff(&todd_form(ring.tangent())?);
    acc = acc.mul(&e2_prefactor(ring, q_order)?);
    for fam in 0..ring.e8().len() {
        acc = acc.mul(&e8_theta_combo(ring, fam, q_order)?);
    }
    Ok(top_degree(ring, &acc))
}

/// `{exp(E2·Σc2(𝒲)/720) · Td(M) · ch E · Θ-factors}^(2d)`.
pub fn ell_definition_route(inst: &GenusInstance) -> Result<USeries> {
    let ring = inst.char_ring()?;
    Ok(USeries::new(ell_definition_route_in(&ring, inst.q_order)?, &ring))
}

/// Reduces a series of root polynomials to the characteristic ring.
fn reduce_roots(
    s: &GaussSeries,
    roots: &[usize],
    target: &Arc<PolyRing>,
    elementary: &[GaussPoly],
    spectators: &[(usize, GaussPoly)],
) -> Result<GaussSeries> {
    s.try_map_coeffs(|c| {
        if c.ring().is_some() {
            c.symmetric_reduce(roots, target, elementary, spectators)
        } else {
            Ok(GaussPoly::constant_in(target, c.constant_term()))
        }
    })
}

/// `∏ x̂ᵢ/θ(τ, xᵢ)` over `d` roots with `e1 = 0`, `e2 = c2`, `e_k = c_k`.
fn tangent_factor(ring: &CharRing, target: &Arc<PolyRing>, internal: i64) -> Result<GaussSeries> {
    let d = ring.d();
    let roots = PolyRing::new((1..=d).map(|k| Generator::new(format!("x{k}"), 2)).collect(), ring.cap())?;
    let mut product = GaussSeries::one(Exp24::int(internal + 1));
    for k in 0..d as usize {
        let x = NilpotentArg::new(GaussPoly::gen(&roots, k))?;
        product = product.mul(&theta_over_arg(&x, internal)?.invert()?);
    }
    let mut elementary = vec![GaussPoly::zero_in(target)];
    for k in 2..=d {
        let name = if k == 2 { names::C2.to_string() } else { names::tangent(k) };
        elementary.push(to_gauss(&ring.var(&name)));
    }
    let idx: Vec<usize> = (0..d as usize).collect();
    reduce_roots(&product, &idx, target, &elementary, &[])
}

/// `∏ θ(τ, wⱼ - z)` over `l` roots with `e1 = 0`, `e2 = c2`, `e_k = w_k`,
/// keeping `u` as a spectator.
fn vector_factor(ring: &CharRing, target: &Arc<PolyRing>, internal: i64) -> Result<GaussSeries> {
    let l = ring.l();
    let trunc = Exp24::int(internal + 1);
    if l == 0 {
        return Ok(GaussSeries::one(trunc));
    }
    let mut gens: Vec<Generator> = (1..=l).map(|k| Generator::new(format!("w{k}"), 2)).collect();
    gens.push(Generator::nilpotent(names::U, 0, ring.u_order() - 1));
    let roots = PolyRing::new(gens, ring.cap())?;
    let u = GaussPoly::gen(&roots, l as usize);
    let mut product = GaussSeries::one(trunc);
    for k in 0..l as usize {
        let arg = NilpotentArg::new(GaussPoly::gen(&roots, k).sub(&u))?;
        product = product.mul(&theta_of(ThetaKind::Theta, &arg, internal)?);
    }
    let mut elementary = vec![GaussPoly::zero_in(target)];
    for k in 2..=l {
        let name = if k == 2 { names::C2.to_string() } else { names::vector(k) };
        elementary.push(to_gauss(&ring.var(&name)));
    }
    let idx: Vec<usize> = (0..l as usize).collect();
    reduce_roots(&product, &idx, target, &elementary, &[(l as usize, to_gauss(&ring.u()))])
}

/// Converts a Gaussian series to a rational one, failing on any surviving
/// imaginary part or fractional exponent.
fn realize(s: &GaussSeries) -> Result<GradedSeries> {
    if let Some((e, _)) = s.terms().find(|(e, c)| !e.is_integral() && !c.is_zero()) {
        return Err(Error::Consistency(format!("theta route keeps a fractional power q^({e})")));
    }
    s.try_map_coeffs(|c| {
        c.try_map_coeffs(|g| {
            if g.is_real() {
                Ok(g.re.clone())
            } else {
                Err(Error::Consistency(format!("theta route keeps an imaginary coefficient {g}")))
            }
        })
    })
}

pub(super) fn ell_theta_route_in(ring: &CharRing, q_order: i64) -> Result<GradedSeries> {
    let internal = q_order + 2;
    let target = ring.ring().clone();
    let d = ring.d() as i64;
    let l = ring.l() as i64;
    let mut acc = tangent_factor(ring, &target, internal)?;
    let eta = eta_pow::<GaussRat>(3 * (d - l), internal)?;
    acc = acc.mul(&eta.map_coeffs(|c| GaussPoly::constant_in(&target, c.clone())));
    acc = acc.mul(&vector_factor(ring, &target, internal)?);
    for fam in 0..ring.e8().len() {
        acc = acc.mul(&e8_theta_combo_scratch(ring, fam, internal)?.map_coeffs(to_gauss));
    }
    acc = acc.mul(&e2_prefactor(ring, internal)?.map_coeffs(to_gauss));
    // The x̂/θ factors carry i^d and the θ(ŵ-u) factors (-i)^l relative to
    // the exterior-power expansion.
    let phase = GaussPoly::constant_in(&target, GaussRat::i_pow(l - d));
    let top = acc.map_coeffs(|c| c.degree_component(ring.cap()).mul(&phase));
    let bound = Exp24::int(q_order + 1);
    if top.trunc() < bound {
        return Err(Error::InsufficientOrder(format!("theta route known only below q^({})", top.trunc())));
    }
    realize(&top.truncated(bound))
}

/// `i^(l-d) {η^(3(d-l)) ∏ x̂ᵢ/θ(τ,xᵢ) ∏ θ(τ, wⱼ-z) · Θ-factors · exp(E2·Σc2(𝒲)/720)}^(2d)`
/// evaluated over explicit roots and symmetrized back to Chern classes.
pub fn ell_theta_route(inst: &GenusInstance) -> Result<USeries> {
    let ring = inst.char_ring()?;
    Ok(USeries::new(ell_theta_route_in(&ring, inst.q_order)?, &ring))
}

/// First monomial on which two polynomials differ, rendered for a witness.
pub(super) fn poly_difference(expected: &GradedPoly, got: &GradedPoly) -> Option<String> {
    let diff = got.sub(expected);
    let (m, _) = diff.terms().next()?;
    let pick = |p: &GradedPoly| p.coeff(m);
    let mono = match expected.ring().or(got.ring()) {
        Some(r) => GradedPoly::from_terms(r, [(m.clone(), rat_int(1))]).to_string(),
        None => "1".into(),
    };
    Some(format!(
        "monomial {}: expected {}, got {}",
        mono.trim_start_matches("1*"),
        crate::ring::fmt_rational(&pick(expected)),
        crate::ring::fmt_rational(&pick(got))
    ))
}

/// One entry per power of `q` comparing two series coefficientwise.
pub(super) fn compare_series(label: &str, expected: &GradedSeries, got: &GradedSeries, q_order: i64) -> Vec<Entry> {
    (0..=q_order)
        .map(|n| {
            let e = expected.coeff_int(n);
            let g = got.coeff_int(n);
            let name = format!("{label} q^{n}");
            match (e, g) {
                (Ok(e), Ok(g)) => {
                    let w = poly_difference(&e, &g);
                    Entry::check(name, w.is_none(), || w.clone().unwrap_or_default())
                }
                (Err(err), _) | (_, Err(err)) => Entry::fail(name, err.to_string()),
            }
        })
        .collect()
}

/// Definition route against theta route, coefficient by coefficient.
pub fn verify_route_equivalence(inst: &GenusInstance) -> VerificationReport {
    let run = || -> Result<Vec<Entry>> {
        let ring = inst.char_ring()?;
        let def = ell_definition_route_in(&ring, inst.q_order)?;
        let theta = ell_theta_route_in(&ring, inst.q_order)?;
        Ok(compare_series("definition = theta", &def, &theta, inst.q_order))
    };
    let report = match run() {
        Ok(entries) => VerificationReport::from_entries("route-equivalence", entries),
        Err(e) => VerificationReport::errored("route-equivalence", &e),
    };
    report.with_instance(inst.tag())
}

/// `exp(l·G2(τ)·u²)`, the normalized form of `exp(-4π² l G2 z²)`.
pub(super) fn c_series_in(ring: &CharRing, q_order: i64) -> Result<GradedSeries> {
    let u2 = ring.u().mul(&ring.u()).scale(&rat_int(ring.l() as i64));
    lift(ring, &eisenstein_g(2, q_order)?).mul_coeff(&u2).exp()
}

pub fn c_series(inst: &GenusInstance) -> Result<USeries> {
    let ring = inst.char_ring()?;
    Ok(USeries::new(c_series_in(&ring, inst.q_order)?, &ring))
}

pub(super) fn a_n_in(ring: &CharRing, ell: &GradedSeries, q_order: i64) -> Result<Vec<GradedSeries>> {
    let full = ell.mul(&c_series_in(ring, q_order)?);
    let u = ring.u_index();
    Ok((0..ring.u_order()).map(|n| full.map_coeffs(|c| c.coeff_of_power(u, n as u8))).collect())
}

/// `(n, aₙ)` for `n < u_order`, where `Σ aₙ uⁿ = exp(l·G2·u²)·Ell`.
pub fn a_n_expansion(inst: &GenusInstance) -> Result<Vec<(u32, GradedSeries)>> {
    let ring = inst.char_ring()?;
    let ell = ell_definition_route_in(&ring, inst.q_order)?;
    Ok(a_n_in(&ring, &ell, inst.q_order)?.into_iter().enumerate().map(|(n, s)| (n as u32, s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charforms::weighted_wedge_sum;
    use crate::genus::Gauge;

    fn inst(d: u32, l: u32, g: Gauge, q: i64, u: u32) -> GenusInstance {
        GenusInstance::new(d, l, g).unwrap().with_q_order(q).unwrap().with_u_order(u).unwrap()
    }

    #[test]
    fn bundle_slices() {
        let i = inst(2, 2, Gauge::None, 1, 3);
        let ring = i.char_ring().unwrap();
        let e = bundle_e_ch_in(&ring, 1).unwrap();
        let u = ring.u_index();
        let lam = weighted_wedge_sum(ring.vector(), true, &[rat_int(1)]).unwrap();
        assert_eq!(e.coeff_int(0).unwrap().coeff_of_power(u, 0), lam);
        let a1 = adams_ch(ring.tangent(), 1, true)
            .add(&adams_ch(ring.tangent(), 1, false))
            .sub(&adams_ch(ring.vector(), 1, true))
            .sub(&adams_ch(ring.vector(), 1, false));
        assert_eq!(e.coeff_int(1).unwrap().coeff_of_power(u, 0), lam.mul(&a1));
    }

    #[test]
    fn rank_zero_is_u_independent() {
        let i = inst(2, 0, Gauge::None, 2, 3);
        assert!(ell_definition_route(&i).unwrap().is_u_independent());
        let a = a_n_expansion(&i).unwrap();
        assert!(a[1].1.is_zero() && a[2].1.is_zero());
    }

    #[test]
    fn routes_agree_without_gauge() {
        for (d, l) in [(1, 1), (2, 2), (2, 1), (2, 3)] {
            let r = verify_route_equivalence(&inst(d, l, Gauge::None, 2, 3));
            assert!(r.passed(), "{}", r.summary_line());
        }
    }

    #[test]
    fn routes_agree_with_e8() {
        let r = verify_route_equivalence(&inst(1, 1, Gauge::E8, 1, 2));
        assert!(r.passed(), "{}", r.summary_line());
    }

    #[test]
    fn c_series_leading_slices() {
        let i = inst(1, 3, Gauge::None, 2, 5);
        let ring = i.char_ring().unwrap();
        let c = c_series_in(&ring, 2).unwrap();
        let u = ring.u();
        let (u2, u4) = (u.pow(2), u.pow(4));
        assert_eq!(
            c.coeff_int(0).unwrap(),
            ring.constant(rat_int(1)).sub(&u2.scale(&rat(3, 24))).add(&u4.scale(&rat(9, 1152)))
        );
        assert_eq!(c.coeff_int(1).unwrap(), u2.scale(&rat_int(3)).sub(&u4.scale(&rat(9, 24))));
    }
}
