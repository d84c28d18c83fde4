//! Twisted elliptic genera: two independent constructions, the `aₙ`
//! expansion in the normalized variable `u = 2πi z`, and the checks built on
//! them.
//!
//! Everything is normalized so no `π` is stored: roots are `x̂ = 2πi x`, and a
//! coefficient `c·πⁿ·zⁿ` (with `c` possibly carrying `√−1`) becomes the `uⁿ`
//! coefficient `c / (2i)ⁿ`; see [`PiCoefficient`].

mod anomaly;
mod jacobi;
mod routes;
mod templates;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use anomaly::{
    anomaly_case, anomaly_cases, decompose_a0, decompose_a0_at, minimal_instance, vanishing_clause_applies,
    verify_anomaly_case, verify_anomaly_case_literal, verify_vanishing_clause, AnomalyCase, Relation, VanishingOutcome,
};
pub use jacobi::{jacobi_numeric_check, observed_weight, JacobiSample, NumericGenus, MIN_IM_TAU};
pub use routes::{
    a_n_expansion, bundle_e_ch, c_series, ell_definition_route, ell_theta_route, verify_route_equivalence,
};

pub use templates::{verify_a0_q2_full, verify_c_series, verify_prop_expansions, PiCoefficient, Templates};

use crate::charforms::CharRing;
use crate::e8char::GradedSeries;
use crate::error::{Error, Result};
use crate::report::InstanceTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    None,
    E8,
    E8xE8,
}

impl Gauge {
    pub const ALL: [Gauge; 3] = [Gauge::None, Gauge::E8, Gauge::E8xE8];

    /// Number of E8 factors.
    pub fn families(self) -> usize {
        match self {
            Gauge::None => 0,
            Gauge::E8 => 1,
            Gauge::E8xE8 => 2,
        }
    }

    /// Weight contributed by the gauge factor: four per E8 family.
    pub fn weight_shift(self) -> i64 {
        4 * self.families() as i64
    }

    pub fn name(self) -> &'static str {
        match self {
            Gauge::None => "none",
            Gauge::E8 => "e8",
            Gauge::E8xE8 => "e8xe8",
        }
    }
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Gauge::None),
            "e8" => Ok(Gauge::E8),
            "e8xe8" | "e8e8" => Ok(Gauge::E8xE8),
            other => Err(Error::Usage(format!("unknown gauge {other:?} (expected none, e8 or e8xe8)"))),
        }
    }
}

pub const DEFAULT_Q_ORDER: i64 = 3;
pub const DEFAULT_U_ORDER: u32 = 5;
pub const DEFAULT_TOL: f64 = 1e-6;

/// One verification scenario: complex dimension `d`, rank `l` of the
/// auxiliary bundle `W`, gauge mode and truncations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenusInstance {
    pub d: u32,
    pub l: u32,
    pub gauge: Gauge,
    /// Highest power of `q` kept.
    pub q_order: i64,
    /// `u^u_order = 0`, so `a_0 .. a_{u_order-1}` are available.
    pub u_order: u32,
    pub tol: f64,
}

impl GenusInstance {
    pub fn new(d: u32, l: u32, gauge: Gauge) -> Result<Self> {
        let inst = GenusInstance { d, l, gauge, q_order: DEFAULT_Q_ORDER, u_order: DEFAULT_U_ORDER, tol: DEFAULT_TOL };
        inst.validate()?;
        Ok(inst)
    }

    pub fn with_q_order(mut self, q_order: i64) -> Result<Self> {
        self.q_order = q_order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_u_order(mut self, u_order: u32) -> Result<Self> {
        self.u_order = u_order;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        self.tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Usage("d must be at least 1".into()));
        }
        if self.gauge != Gauge::None && 2 * self.d >= crate::e8char::E8_DEGREE_LIMIT {
            return Err(Error::Usage(format!(
                "gauge {} needs 2d < {}, got 2d = {}",
                self.gauge,
                crate::e8char::E8_DEGREE_LIMIT,
                2 * self.d
            )));
        }
        if self.q_order < 0 {
            return Err(Error::Usage("q_order must be non-negative".into()));
        }
        if self.u_order == 0 {
            return Err(Error::Usage("u_order must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Usage("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// `2d - l`, the quantity indexing the anomaly cases.
    pub fn excess(&self) -> i64 {
        2 * self.d as i64 - self.l as i64
    }

    /// The weight quoted for the genus: `2d - l` plus four per E8 factor.
    pub fn stated_weight(&self) -> i64 {
        self.excess() + self.gauge.weight_shift()
    }

    /// The weight forced by homogeneity of the theta product: the degree-`2d`
    /// slice rescales by `τ^d`, so the genus has weight `d - l` plus four per
    /// E8 factor.
    pub fn scaling_weight(&self) -> i64 {
        self.d as i64 - self.l as i64 + self.gauge.weight_shift()
    }

    pub fn char_ring(&self) -> Result<CharRing> {
        CharRing::new(self.d, self.l, self.gauge.families(), self.u_order)
    }

    pub fn tag(&self) -> InstanceTag {
        InstanceTag { d: self.d, l: self.l, gauge: self.gauge.name().into() }
    }
}

/// The genus as a q-series whose coefficients are polynomials in the
/// characteristic classes and the nilpotent `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct USeries {
    series: GradedSeries,
    u_index: usize,
    u_order: u32,
}

impl USeries {
    pub fn new(series: GradedSeries, ring: &CharRing) -> Self {
        USeries { series, u_index: ring.u_index(), u_order: ring.u_order() }
    }

    pub fn series(&self) -> &GradedSeries {
        &self.series
    }

    pub fn max_u_power(&self) -> u32 {
        self.u_order - 1
    }

    /// The `uⁿ` coefficient as a q-series.
    pub fn u_coefficient(&self, n: u32) -> GradedSeries {
        self.series.map_coeffs(|c| c.coeff_of_power(self.u_index, n as u8))
    }

    pub fn is_u_independent(&self) -> bool {
        (1..self.u_order).all(|n| self.u_coefficient(n).is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_parsing() {
        assert_eq!("E8".parse::<Gauge>().unwrap(), Gauge::E8);
        assert_eq!("e8xe8".parse::<Gauge>().unwrap(), Gauge::E8xE8);
        assert_eq!("none".parse::<Gauge>().unwrap(), Gauge::None);
        assert!("so32".parse::<Gauge>().is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(GenusInstance::new(8, 2, Gauge::E8).is_err());
        assert!(GenusInstance::new(8, 2, Gauge::None).is_ok());
        assert!(GenusInstance::new(0, 2, Gauge::None).is_err());
        let i = GenusInstance::new(2, 2, Gauge::E8).unwrap();
        assert_eq!(i.stated_weight(), 6);
        assert_eq!(i.scaling_weight(), 4);
        assert!(i.clone().with_u_order(0).is_err());
    }
}
