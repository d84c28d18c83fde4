//! Anomaly cancellation: proportionality relations among the first
//! coefficients of `a₀`, vanishing clauses, and projection of `a₀` onto
//! modular forms.

use serde::Serialize;

use super::routes::{a_n_in, ell_definition_route_in, poly_difference};
use super::templates::Templates;
use super::{Gauge, GenusInstance};
use crate::charforms::CharRing;
use crate::e8char::GradedSeries;
use crate::eisenstein::{decompose, ModularWeight};
use crate::error::{Error, Result};
use crate::poly::GradedPoly;
use crate::report::{Entry, VerificationReport};
use crate::ring::{rat_int, Ring};

/// How `a₀[q¹]` and `a₀[q²]` are tied to `a₀[q⁰]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `a₀[q¹] = κ₁ a₀[q⁰]` and `a₀[q²] = κ₂ a₀[q⁰]`.
    Proportional { k1: i64, k2: i64 },
    /// `a₀[q²] = A a₀[q⁰] + B a₀[q¹]`.
    Pair { a: i64, b: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnomalyCase {
    pub gauge: Gauge,
    /// The value of `2d - l`.
    pub excess: i64,
    pub relation: Relation,
}

const RELATIONS: [Relation; 7] = [
    Relation::Proportional { k1: 240, k2: 2160 },
    Relation::Proportional { k1: -504, k2: -16632 },
    Relation::Proportional { k1: 480, k2: 61920 },
    Relation::Proportional { k1: -264, k2: -135432 },
    Relation::Pair { a: 196560, b: -24 },
    Relation::Proportional { k1: -24, k2: -196632 },
    Relation::Pair { a: 146880, b: 216 },
];

fn first_excess(gauge: Gauge) -> Option<i64> {
    match gauge {
        Gauge::None => None,
        Gauge::E8 => Some(0),
        Gauge::E8xE8 => Some(-4),
    }
}

/// The seven cases for a gauge, in order of `2d - l`.
pub fn anomaly_cases(gauge: Gauge) -> Vec<AnomalyCase> {
    let Some(start) = first_excess(gauge) else {
        return Vec::new();
    };
    RELATIONS
        .iter()
        .enumerate()
        .map(|(i, r)| AnomalyCase { gauge, excess: start + 2 * i as i64, relation: *r })
        .collect()
}

pub fn anomaly_case(gauge: Gauge, excess: i64) -> Result<AnomalyCase> {
    anomaly_cases(gauge)
        .into_iter()
        .find(|c| c.excess == excess)
        .ok_or_else(|| Error::Usage(format!("no anomaly case for gauge {gauge} with 2d-l = {excess}")))
}

/// Smallest `(d, l)` realizing a case: `l = 2` where possible, otherwise
/// the smallest `d` (with `(2, 4)` for `2d - l = 0` under E8).
pub fn minimal_instance(case: &AnomalyCase) -> (u32, u32) {
    match (case.gauge, case.excess) {
        (Gauge::E8, 0) => (2, 4),
        (_, k) if k >= 0 => (((k + 2) / 2) as u32, 2),
        (_, k) => (1, (2 - k) as u32),
    }
}

/// `a₀` through `q^q_order` (only its `u⁰` part is needed, so `u` is cut).
fn a0_series(inst: &GenusInstance, q_order: i64) -> Result<(CharRing, GradedSeries)> {
    let light = inst.clone().with_u_order(1)?.with_q_order(q_order)?;
    let ring = light.char_ring()?;
    let ell = ell_definition_route_in(&ring, q_order)?;
    let a = a_n_in(&ring, &ell, q_order)?;
    Ok((ring, a.into_iter().next().expect("a0 is always present")))
}

fn relation_entries(relation: Relation, c: &[GradedPoly; 3]) -> Vec<Entry> {
    let check = |label: String, expected: GradedPoly, got: &GradedPoly| {
        let w = poly_difference(&expected, got);
        Entry::check(label, w.is_none(), || w.clone().unwrap_or_default())
    };
    match relation {
        Relation::Proportional { k1, k2 } => vec![
            check(format!("q^1 = {k1}·q^0"), c[0].scale(&rat_int(k1)), &c[1]),
            check(format!("q^2 = {k2}·q^0"), c[0].scale(&rat_int(k2)), &c[2]),
        ],
        Relation::Pair { a, b } => vec![check(
            format!("q^2 = {a}·q^0 + ({b})·q^1"),
            c[0].scale(&rat_int(a)).add(&c[1].scale(&rat_int(b))),
            &c[2],
        )],
    }
}

fn case_report(
    check: &str,
    inst: &GenusInstance,
    case: &AnomalyCase,
    c: Result<[GradedPoly; 3]>,
) -> VerificationReport {
    let report = match c {
        Ok(c) => {
            let vacuous = c.iter().all(|p| p.is_zero());
            let r = VerificationReport::from_entries(check, relation_entries(case.relation, &c));
            if vacuous {
                r.with_note("vacuous: all three coefficients vanish")
            } else {
                r
            }
        }
        Err(e) => VerificationReport::errored(check, &e),
    };
    report.with_instance(inst.tag())
}

fn check_case_matches(inst: &GenusInstance, case: &AnomalyCase) -> Result<()> {
    if inst.gauge != case.gauge || inst.excess() != case.excess {
        return Err(Error::Usage(format!(
            "instance (gauge {}, 2d-l = {}) does not match case (gauge {}, 2d-l = {})",
            inst.gauge,
            inst.excess(),
            case.gauge,
            case.excess
        )));
    }
    Ok(())
}

/// The case relation on the computed coefficients of `a₀`.
pub fn verify_anomaly_case(inst: &GenusInstance, case: &AnomalyCase) -> VerificationReport {
    let coeffs = || -> Result<[GradedPoly; 3]> {
        check_case_matches(inst, case)?;
        let (_, a0) = a0_series(inst, inst.q_order.max(2))?;
        Ok([a0.coeff_int(0)?, a0.coeff_int(1)?, a0.coeff_int(2)?])
    };
    case_report("anomaly", inst, case, coeffs())
}

/// The case relation on the closed-form expressions taken without the
/// `exp(Σc2/720)` prefactor, i.e. `{Td·Λ₋₁(W*)·…}^(2d)` as written.
pub fn verify_anomaly_case_literal(inst: &GenusInstance, case: &AnomalyCase) -> VerificationReport {
    let coeffs = || -> Result<[GradedPoly; 3]> {
        check_case_matches(inst, case)?;
        let ring = inst.clone().with_u_order(1)?.char_ring()?;
        let t = Templates::new(&ring, inst.gauge)?;
        let top = |p: GradedPoly| p.degree_component(ring.cap());
        Ok([top(t.a0_q0()), top(t.a0_q1()), top(t.a0_q2())])
    };
    case_report("anomaly-literal", inst, case, coeffs())
}

/// Whether vanishing clause `clause` (1..=5, for `a_{clause-1}`) covers
/// `2d - l = excess`.
pub fn vanishing_clause_applies(gauge: Gauge, clause: u32, excess: i64) -> bool {
    let shift = match gauge {
        Gauge::None => return false,
        Gauge::E8 => 0,
        Gauge::E8xE8 => 4,
    };
    let c = clause as i64;
    (excess + c) % 2 == 0 || (excess <= -(c + 1) - shift && excess != -(c + 3) - shift)
}

/// Result of one vanishing clause on one instance.
#[derive(Clone, Debug)]
pub struct VanishingOutcome {
    pub clause: u32,
    pub report: VerificationReport,
    /// The expressions vanish for a reason independent of the clause: every
    /// wedge sum involved is zero in the degrees that can reach `2d`.
    pub vacuous: bool,
}

/// Whether some monomial of the ring (without `u`) has degree `k`.
fn degree_occurs(ring: &CharRing, k: u32) -> bool {
    let degrees: Vec<u32> = ring.ring().gens().iter().filter(|g| g.degree > 0).map(|g| g.degree).collect();
    let mut reach = vec![false; k as usize + 1];
    reach[0] = true;
    for n in 1..=k as usize {
        reach[n] = degrees.iter().any(|&g| g as usize <= n && reach[n - g as usize]);
    }
    reach[k as usize]
}

fn reaches_top(ring: &CharRing, p: &GradedPoly) -> bool {
    (0..=ring.cap()).any(|j| !p.degree_component(j).is_zero() && degree_occurs(ring, ring.cap() - j))
}

/// Evaluates clause `clause` on `inst`, both as the closed-form expressions
/// and as the designated computed coefficients; both must vanish.
pub fn verify_vanishing_clause(inst: &GenusInstance, clause: u32) -> VanishingOutcome {
    let run = || -> Result<(Vec<Entry>, bool)> {
        if !(1..=5).contains(&clause) {
            return Err(Error::Usage(format!("vanishing clause must be 1..=5, got {clause}")));
        }
        let inst = inst.clone().with_u_order(5)?.with_q_order(2)?;
        let ring = inst.char_ring()?;
        let t = Templates::new(&ring, inst.gauge)?;
        let ell = ell_definition_route_in(&ring, 2)?;
        let a = a_n_in(&ring, &ell, 2)?;
        let l = inst.l;
        let top = |p: GradedPoly| p.degree_component(ring.cap());
        let (literal, computed, sums): (Vec<GradedPoly>, Vec<(usize, i64)>, Vec<usize>) = match clause {
            1 => (vec![top(t.a0_q0()), top(t.a0_q1()), top(t.a0_q2())], vec![(0, 0), (0, 1), (0, 2)], vec![0]),
            2 => (vec![top(t.a1_q0()), top(t.a1_q1(l))], vec![(1, 0), (1, 1)], vec![0, 1]),
            3 => (vec![top(t.a2_q0(l))], vec![(2, 0)], vec![0, 2]),
            4 => (vec![top(t.a3_q0(l))], vec![(3, 0)], vec![1, 3]),
            _ => (vec![top(t.a4_q0(l))], vec![(4, 0)], vec![0, 2, 4]),
        };
        let vacuous = sums.iter().all(|&n| !reaches_top(&ring, &t.wedge[n]));
        let zero = GradedPoly::zero_in(ring.ring());
        let mut entries = Vec::new();
        for (k, p) in literal.iter().enumerate() {
            let w = poly_difference(&zero, p);
            entries
                .push(Entry::check(format!("expression {} = 0", k + 1), w.is_none(), || w.clone().unwrap_or_default()));
        }
        for (n, q) in computed {
            let c = a[n].coeff_int(q)?;
            let w = poly_difference(&zero, &c);
            entries.push(Entry::check(format!("a{n} q^{q} = 0"), w.is_none(), || w.clone().unwrap_or_default()));
        }
        Ok((entries, vacuous))
    };
    let check = format!("vanishing clause {clause}");
    match run() {
        Ok((entries, vacuous)) => {
            let mut report = VerificationReport::from_entries(check, entries).with_instance(inst.tag());
            if vacuous {
                report = report.with_note("vacuous: the wedge sums cannot reach degree 2d");
            }
            VanishingOutcome { clause, report, vacuous }
        }
        Err(e) => VanishingOutcome {
            clause,
            report: VerificationReport::errored(check, &e).with_instance(inst.tag()),
            vacuous: false,
        },
    }
}

/// Projects `a₀` onto modular forms of the stated weight.
pub fn decompose_a0(inst: &GenusInstance) -> VerificationReport {
    decompose_a0_at(inst, inst.stated_weight())
}

/// Projects `a₀` onto modular forms of weight `weight`, solving from the
/// first `dim` coefficients and requiring zero residual through `q_order`.
/// With no forms of that weight, `a₀` itself must vanish.
pub fn decompose_a0_at(inst: &GenusInstance, weight: i64) -> VerificationReport {
    let check = format!("decompose-a0 (weight {weight})");
    let run = || -> Result<(Vec<Entry>, bool)> {
        let w = ModularWeight(weight);
        let dim = w.dimension() as i64;
        if inst.q_order < dim {
            return Err(Error::InsufficientOrder(format!(
                "weight {weight} has dimension {dim}; q_order {} leaves no overdetermined coefficient",
                inst.q_order
            )));
        }
        let (ring, a0) = a0_series(inst, inst.q_order)?;
        let zero = GradedPoly::zero_in(ring.ring());
        let vacuous = (0..=inst.q_order).all(|n| a0.coeff_int(n).map(|c| c.is_zero()).unwrap_or(false));
        let mut entries = Vec::new();
        if dim == 0 {
            for n in 0..=inst.q_order {
                let c = a0.coeff_int(n)?;
                let wit = poly_difference(&zero, &c);
                entries.push(Entry::check(
                    format!("a0 q^{n} = 0 (no forms of weight {weight})"),
                    wit.is_none(),
                    || wit.clone().unwrap_or_default(),
                ));
            }
            return Ok((entries, vacuous));
        }
        let dec = decompose(&a0, w, inst.q_order)?;
        for n in dim..=inst.q_order {
            let r = dec.residual.coeff_int(n)?;
            let wit = poly_difference(&zero, &r);
            let mut e = Entry::check(format!("residual q^{n} = 0"), wit.is_none(), || wit.clone().unwrap_or_default());
            if n == dim {
                let lambdas: Vec<String> =
                    dec.coefficients.iter().map(|(a, b, lam)| format!("G4^{a}G6^{b}: {lam}")).collect();
                e = e.with_note(lambdas.join("; "));
            }
            entries.push(e);
        }
        Ok((entries, vacuous))
    };
    let report = match run() {
        Ok((entries, vacuous)) => {
            let r = VerificationReport::from_entries(check, entries);
            if vacuous {
                r.with_note("vacuous: a0 vanishes through the truncation")
            } else {
                r
            }
        }
        Err(e) => VerificationReport::errored(check, &e),
    };
    report.with_instance(inst.tag())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_tables() {
        let e8 = anomaly_cases(Gauge::E8);
        assert_eq!(e8.len(), 7);
        assert_eq!(e8[4].excess, 8);
        assert_eq!(e8[4].relation, Relation::Pair { a: 196560, b: -24 });
        let ee = anomaly_cases(Gauge::E8xE8);
        assert_eq!(ee[0].excess, -4);
        assert_eq!(ee[6].excess, 8);
        assert!(anomaly_cases(Gauge::None).is_empty());
        assert_eq!(minimal_instance(&e8[0]), (2, 4));
        assert_eq!(minimal_instance(&e8[4]), (5, 2));
        assert_eq!(minimal_instance(&ee[0]), (1, 6));
        assert_eq!(minimal_instance(&ee[2]), (1, 2));
    }

    #[test]
    fn clause_ranges() {
        assert!(vanishing_clause_applies(Gauge::E8, 1, 3));
        assert!(vanishing_clause_applies(Gauge::E8, 1, -2));
        assert!(!vanishing_clause_applies(Gauge::E8, 1, -4));
        assert!(vanishing_clause_applies(Gauge::E8, 1, -6));
        assert!(!vanishing_clause_applies(Gauge::E8, 1, 2));
        assert!(vanishing_clause_applies(Gauge::E8, 2, 2));
        assert!(!vanishing_clause_applies(Gauge::E8xE8, 1, -2));
        assert!(vanishing_clause_applies(Gauge::E8xE8, 1, -6));
        assert!(!vanishing_clause_applies(Gauge::E8xE8, 1, -8));
    }

    #[test]
    fn mismatched_case_is_refused() {
        let inst = GenusInstance::new(2, 2, Gauge::E8).unwrap();
        let case = anomaly_case(Gauge::E8, 0).unwrap();
        assert!(!verify_anomaly_case(&inst, &case).passed());
    }

    #[test]
    fn weight_four_is_a_multiple_of_g4() {
        // (2,2) under E8: the product has weight d - l + 4 = 4.
        let inst = GenusInstance::new(2, 2, Gauge::E8).unwrap().with_q_order(3).unwrap();
        let r = decompose_a0_at(&inst, 4);
        assert!(r.passed(), "{}", r.summary_line());
        assert!(r.note.is_none());
    }

    #[test]
    fn rank_above_dimension_is_vacuous() {
        let inst = GenusInstance::new(2, 4, Gauge::E8).unwrap();
        let r = verify_anomaly_case(&inst, &anomaly_case(Gauge::E8, 0).unwrap());
        assert!(r.passed());
        assert!(r.note.is_some());
    }
}
