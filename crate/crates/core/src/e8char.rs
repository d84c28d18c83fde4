//! The E8 factor `Θ = ½(∏θ1 + ∏θ2 + ∏θ3)(τ, ŷ_κ)` over eight formal roots,
//! written in the even power sums `P2 = Σŷ², P4 = Σŷ⁴, P6 = Σŷ⁶`, and the
//! characters read off from `Θ/φ⁸`.
//!
//! The production route expands `log θ_i(τ,v)/θ_i(τ,0)` once in a single
//! variable and sums it over the roots, which lands directly on power sums.
//! [`e8_theta_combo_scratch`] multiplies the eight theta factors literally in
//! a ring of eight roots and symmetrizes; it is the oracle for the first.

use std::sync::Arc;

use crate::charforms::{names, CharRing};
use crate::error::{Error, Result};
use crate::poly::{elementary_from_power_sums, Generator, GradedPoly, PolyRing};
use crate::qseries::{phi, Exp24, Q24Series};
use crate::ring::{rat, Rational, Ring};
use crate::theta::{theta_even_of, NilpotentArg, ThetaKind};
use crate::trunc::TruncPoly;

pub type GradedSeries = Q24Series<GradedPoly>;

const EVEN_KINDS: [ThetaKind; 3] = [ThetaKind::Theta1, ThetaKind::Theta2, ThetaKind::Theta3];

/// Cohomological degree at which the first invariant beyond `P2, P4, P6`
/// would be needed.
pub const E8_DEGREE_LIMIT: u32 = 16;

fn check_cap(ring: &CharRing, fam: usize) -> Result<()> {
    if ring.cap() >= E8_DEGREE_LIMIT {
        return Err(Error::Domain(format!("E8 factor needs degree cap below {E8_DEGREE_LIMIT}, got {}", ring.cap())));
    }
    if fam >= ring.e8().len() {
        return Err(Error::Usage(format!("ring has no E8 family {fam}")));
    }
    Ok(())
}

/// `log(θ(τ,v)/θ(τ,0))` as a q-series of polynomials in `v` of degree at
/// most `k_max`.
fn log_ratio(kind: ThetaKind, k_max: usize, order: i64) -> Result<Q24Series<TruncPoly<Rational>>> {
    let v = NilpotentArg::new(TruncPoly::<Rational>::variable(k_max))?;
    let full = theta_even_of(kind, &v, order)?;
    let at_zero = full.map_coeffs(|c| TruncPoly::constant(c.coeff(0)));
    full.mul(&at_zero.invert()?).log()
}

/// The E8 theta combination of family `fam`, through `q^q_order`.
pub fn e8_theta_combo(ring: &CharRing, fam: usize, q_order: i64) -> Result<GradedSeries> {
    check_cap(ring, fam)?;
    let cap = ring.cap();
    let k_max = (cap / 2) as usize;
    let internal = q_order + 1;
    let r = ring.ring();
    let power_sum = |k: usize| -> GradedPoly {
        if k % 2 == 0 && 2 * k as u32 <= cap {
            ring.var(&names::e8(fam, (k / 2) as u32))
        } else {
            GradedPoly::zero_in(r)
        }
    };
    let mut total = GradedSeries::zero(Exp24::int(internal + 1));
    for kind in EVEN_KINDS {
        let logs = log_ratio(kind, k_max, internal)?;
        let mut exponent = GradedSeries::zero(logs.trunc());
        for (e, poly) in logs.terms() {
            let mut c = GradedPoly::zero_in(r);
            for (k, x) in poly.coeffs().iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if k % 2 == 1 {
                    return Err(Error::Consistency(format!("{} has an odd term v^{k}", kind.name())));
                }
                c = c.add(&power_sum(k).scale(x));
            }
            exponent.add_term(e, c);
        }
        let base = theta_even_of(kind, &NilpotentArg::new(Rational::zero())?, internal)?.pow(8);
        let base = base.map_coeffs(|c| GradedPoly::constant_in(r, c.clone()));
        total = total.add(&base.mul(&exponent.exp()?));
    }
    finish_combo(total, q_order)
}

fn finish_combo(total: GradedSeries, q_order: i64) -> Result<GradedSeries> {
    let bound = Exp24::int(q_order + 1);
    if total.trunc() < bound {
        return Err(Error::InsufficientOrder(format!("E8 combination known only below q^({})", total.trunc())));
    }
    let combo = total.scale(&rat(1, 2)).truncated(bound);
    if let Some((e, _)) = combo.terms().find(|(e, _)| !e.is_integral()) {
        return Err(Error::Consistency(format!("E8 combination has a fractional power q^({e})")));
    }
    Ok(combo)
}

/// The same combination by multiplying eight theta factors at explicit
/// roots and symmetrizing. Also verifies that only even power sums occur.
pub fn e8_theta_combo_scratch(ring: &CharRing, fam: usize, q_order: i64) -> Result<GradedSeries> {
    check_cap(ring, fam)?;
    let cap = ring.cap();
    let k_max = (cap / 2) as usize;
    let internal = q_order + 1;
    let roots = PolyRing::new((1..=8).map(|k| Generator::new(format!("y{k}"), 2)).collect(), cap)?;
    // Power sums p1..p_kmax as free generators, to see odd ones if they occur.
    let sums = PolyRing::new((1..=k_max).map(|k| Generator::new(format!("p{k}"), 2 * k as u32)).collect(), cap)?;
    let p: Vec<GradedPoly> = (0..k_max).map(|k| GradedPoly::gen(&sums, k)).collect();
    let elementary = elementary_from_power_sums(&p, 8);

    let mut total = Q24Series::<GradedPoly>::zero(Exp24::int(internal + 1));
    for kind in EVEN_KINDS {
        let mut product = Q24Series::one(Exp24::int(internal + 1));
        for k in 0..8 {
            let y = NilpotentArg::new(GradedPoly::gen(&roots, k))?;
            product = product.mul(&theta_even_of(kind, &y, internal)?);
        }
        total = total.add(&product);
    }
    let indices: Vec<usize> = (0..8).collect();
    let r = ring.ring();
    let images: Vec<GradedPoly> = (1..=k_max)
        .map(|k| {
            if k % 2 == 0 && 2 * k as u32 <= cap {
                ring.var(&names::e8(fam, (k / 2) as u32))
            } else {
                GradedPoly::zero_in(r)
            }
        })
        .collect();
    let reduced = total.try_map_coeffs(|c| {
        let in_sums = if c.ring().is_some() {
            c.symmetric_reduce(&indices, &sums, &elementary, &[])?
        } else {
            GradedPoly::constant_in(&sums, c.constant_term())
        };
        for (m, _) in in_sums.terms() {
            if let Some(k) = (0..k_max).find(|k| k % 2 == 0 && m.exp(*k) > 0) {
                return Err(Error::Consistency(format!("odd power sum p{} occurs", k + 1)));
            }
        }
        Ok(in_sums.substitute(r, &images, |x| x.clone()))
    })?;
    finish_combo(reduced, q_order)
}

/// `ch 𝒱 = Θ / φ⁸`.
pub fn chv_series(ring: &CharRing, fam: usize, q_order: i64) -> Result<GradedSeries> {
    let combo = e8_theta_combo(ring, fam, q_order)?;
    Ok(divide_by_phi8(ring.ring(), &combo, q_order))
}

fn divide_by_phi8(r: &Arc<PolyRing>, combo: &GradedSeries, q_order: i64) -> GradedSeries {
    let inv = phi::<Rational>(q_order).pow(8).invert().expect("φ⁸ is a unit");
    combo.mul(&inv.map_coeffs(|c| GradedPoly::constant_in(r, c.clone())))
}

/// `ch 𝒲 = [q¹] ch 𝒱`, `ch 𝒲̄ = [q²] ch 𝒱`, and `c2(𝒲) = -30·P2`.
#[derive(Clone, Debug, PartialEq)]
pub struct E8Characters {
    pub chw: GradedPoly,
    pub chwbar: GradedPoly,
    pub c2: GradedPoly,
}

pub fn adjoint_and_level2(ring: &CharRing, fam: usize, q_order: i64) -> Result<E8Characters> {
    let chv = chv_series(ring, fam, q_order.max(2))?;
    Ok(E8Characters { chw: chv.coeff_int(1)?, chwbar: chv.coeff_int(2)?, c2: ring.e8_c2(fam) })
}

/// Everything the E8 factor provides for one family.
#[derive(Clone, Debug)]
pub struct E8CharacterSeries {
    pub theta_combo: GradedSeries,
    pub chv: GradedSeries,
    pub chw: GradedPoly,
    pub chwbar: GradedPoly,
}

pub fn e8_character_series(ring: &CharRing, fam: usize, q_order: i64) -> Result<E8CharacterSeries> {
    let order = q_order.max(2);
    let theta_combo = e8_theta_combo(ring, fam, order)?;
    let chv = divide_by_phi8(ring.ring(), &theta_combo, order);
    Ok(E8CharacterSeries { chw: chv.coeff_int(1)?, chwbar: chv.coeff_int(2)?, theta_combo, chv })
}

/// Sets every generator to zero.
pub fn y_zero_slice(s: &GradedSeries) -> Q24Series<Rational> {
    s.map_coeffs(|c| c.constant_term())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eisenstein::{eisenstein_g, normalized};
    use crate::ring::rat_int;

    #[test]
    fn y_zero_slice_is_g4() {
        let ring = CharRing::new(5, 2, 1, 1).unwrap();
        let combo = e8_theta_combo(&ring, 0, 3).unwrap();
        let g4 = normalized(&eisenstein_g(4, 3).unwrap()).unwrap();
        assert_eq!(y_zero_slice(&combo), g4);
    }

    #[test]
    fn literal_product_at_zero_is_g4() {
        // ½ Σ θ_i(τ,0)^8 computed straight from the products
        let zero = NilpotentArg::new(Rational::zero()).unwrap();
        let mut s = Q24Series::<Rational>::zero(Exp24::int(5));
        for kind in EVEN_KINDS {
            s = s.add(&theta_even_of(kind, &zero, 4).unwrap().pow(8));
        }
        let s = s.scale(&rat(1, 2)).truncated(Exp24::int(4));
        assert_eq!(s.int_coeffs(3).unwrap(), vec![rat_int(1), rat_int(240), rat_int(2160), rat_int(6720)]);
    }

    #[test]
    fn dimensions() {
        let ring = CharRing::new(3, 2, 1, 1).unwrap();
        let chv = chv_series(&ring, 0, 3).unwrap();
        let dims: Vec<Rational> = (0..3).map(|n| chv.coeff_int(n).unwrap().constant_term()).collect();
        assert_eq!(dims, vec![rat_int(1), rat_int(248), rat_int(4124)]);
        assert_eq!(chv.coeff_int(0).unwrap(), GradedPoly::one());
        let lower = chv_series(&ring, 0, 2).unwrap();
        assert_eq!(lower, chv.truncated(Exp24::int(3)));
    }

    #[test]
    fn adjoint_degree_four_is_thirty_p2() {
        let ring = CharRing::new(3, 2, 1, 1).unwrap();
        let ch = adjoint_and_level2(&ring, 0, 2).unwrap();
        let p2 = ring.var("P2");
        assert_eq!(ch.chw.degree_component(0), GradedPoly::constant(rat_int(248)));
        assert_eq!(ch.chw.degree_component(4), p2.scale(&rat_int(30)));
        assert_eq!(ch.chw.degree_component(4), ch.c2.neg());
        assert_eq!(ch.chwbar.degree_component(0), GradedPoly::constant(rat_int(4124)));
    }

    #[test]
    fn scratch_route_agrees() {
        for d in [2u32, 3] {
            let ring = CharRing::new(d, 2, 1, 1).unwrap();
            let fast = e8_theta_combo(&ring, 0, 2).unwrap();
            let scratch = e8_theta_combo_scratch(&ring, 0, 2).unwrap();
            assert_eq!(fast, scratch, "d={d}");
        }
    }

    #[test]
    fn cap_sixteen_is_refused() {
        let ring = CharRing::new(8, 2, 1, 1).unwrap();
        assert!(matches!(e8_theta_combo(&ring, 0, 1), Err(Error::Domain(_))));
        let no_e8 = CharRing::new(2, 2, 0, 1).unwrap();
        assert!(e8_theta_combo(&no_e8, 0, 1).is_err());
    }
}
