//! Market primitives: exogenous parameters, derived constants, customer
//! defection, the MVNO traffic split and the profit of every actor.
//!
//! Customer bases are raw subscriber counts, prices and costs are per
//! subscriber and period, profits are per period. All evaluation is pure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Absolute tolerance used for threshold comparisons unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest admissible WiFi offload share.
pub const MAX_GAMMA: f64 = 0.999;

/// One of the two incumbent operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum MnoId {
    One,
    Two,
}

impl MnoId {
    pub const BOTH: [MnoId; 2] = [MnoId::One, MnoId::Two];

    /// Zero-based index into two-element arrays.
    pub fn index(self) -> usize {
        match self {
            MnoId::One => 0,
            MnoId::Two => 1,
        }
    }

    pub fn other(self) -> MnoId {
        match self {
            MnoId::One => MnoId::Two,
            MnoId::Two => MnoId::One,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl TryFrom<u8> for MnoId {
    type Error = String;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(MnoId::One),
            2 => Ok(MnoId::Two),
            other => Err(format!("MNO id must be 1 or 2, got {other}")),
        }
    }
}

impl From<MnoId> for u8 {
    fn from(id: MnoId) -> u8 {
        id.number()
    }
}

impl fmt::Display for MnoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Exogenous market constants.
///
/// Field names double as the keys of the JSON configuration format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Subscribers of MNO 1 before the MVNO enters.
    pub q1: f64,
    pub q2: f64,
    /// Retail unit prices.
    pub p1: f64,
    pub p2: f64,
    /// Unit network costs.
    pub c1: f64,
    pub c2: f64,
    /// Unit non-network costs.
    pub ct1: f64,
    pub ct2: f64,
    /// Fixed costs.
    pub cf1: f64,
    pub cf2: f64,
    /// Price-demand elasticity.
    pub eps: f64,
    /// Share of MVNO traffic carried by free WiFi.
    pub gamma: f64,
    /// MVNO net unit indirect revenue.
    pub r0: f64,
    /// MVNO unit non-network cost.
    pub ct0: f64,
    /// MVNO fixed cost.
    pub cf0: f64,
}

impl MarketParams {
    /// The reference market used throughout the examples and tests.
    pub fn reference() -> Self {
        MarketParams {
            q1: 600.0,
            q2: 400.0,
            p1: 40.0,
            p2: 30.0,
            c1: 8.0,
            c2: 6.0,
            ct1: 4.0,
            ct2: 3.0,
            cf1: 0.0,
            cf2: 0.0,
            eps: 0.5,
            gamma: 0.4,
            r0: 10.0,
            ct0: 2.0,
            cf0: 0.0,
        }
    }

    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    /// Exchanges every MNO 1 quantity with its MNO 2 counterpart.
    ///
    /// The result only passes validation when `p1 == p2`.
    pub fn swapped(&self) -> Self {
        MarketParams {
            q1: self.q2,
            q2: self.q1,
            p1: self.p2,
            p2: self.p1,
            c1: self.c2,
            c2: self.c1,
            ct1: self.ct2,
            ct2: self.ct1,
            cf1: self.cf2,
            cf2: self.cf1,
            ..*self
        }
    }

    /// Multiplies customer bases and fixed costs by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        MarketParams {
            q1: self.q1 * k,
            q2: self.q2 * k,
            cf1: self.cf1 * k,
            cf2: self.cf2 * k,
            cf0: self.cf0 * k,
            ..*self
        }
    }

    pub fn q(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.q1,
            MnoId::Two => self.q2,
        }
    }

    pub fn p(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.p1,
            MnoId::Two => self.p2,
        }
    }

    pub fn c(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.c1,
            MnoId::Two => self.c2,
        }
    }

    pub fn ct(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.ct1,
            MnoId::Two => self.ct2,
        }
    }

    pub fn cf(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.cf1,
            MnoId::Two => self.cf2,
        }
    }

    /// Unit retail margin `p - c - ct`.
    pub fn margin(&self, mno: MnoId) -> f64 {
        self.p(mno) - self.c(mno) - self.ct(mno)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("q1", self.q1),
            ("q2", self.q2),
            ("p1", self.p1),
            ("p2", self.p2),
            ("c1", self.c1),
            ("c2", self.c2),
            ("ct1", self.ct1),
            ("ct2", self.ct2),
            ("cf1", self.cf1),
            ("cf2", self.cf2),
            ("eps", self.eps),
            ("gamma", self.gamma),
            ("r0", self.r0),
            ("ct0", self.ct0),
            ("cf0", self.cf0),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(invalid(name, value, "must be finite"));
            }
            if value < 0.0 {
                return Err(invalid(name, value, "must be non-negative"));
            }
        }
        for (name, value) in [("q1", self.q1), ("q2", self.q2), ("p1", self.p1), ("p2", self.p2)] {
            if value <= 0.0 {
                return Err(invalid(name, value, "must be positive"));
            }
        }
        if self.eps <= 0.0 {
            return Err(invalid("eps", self.eps, "must be positive"));
        }
        if self.gamma > MAX_GAMMA {
            return Err(invalid("gamma", self.gamma, "must lie in [0, 0.999]"));
        }
        if self.p2 > self.p1 {
            return Err(ModelError::PriceOrdering {
                p1: self.p1,
                p2: self.p2,
            });
        }
        for mno in MnoId::BOTH {
            let margin = self.margin(mno);
            if margin < 0.0 {
                return Err(ModelError::NegativeMargin { mno, margin });
            }
        }
        Ok(())
    }

    pub fn derived(&self) -> DerivedQuantities {
        let q_total = self.q1 + self.q2;
        let pi1 = self.q1 / q_total;
        let s = self.q1 / self.p1 + self.q2 / self.p2;
        DerivedQuantities {
            q_total,
            pi1,
            pi2: 1.0 - pi1,
            s,
            h1: self.margin(MnoId::One),
            h2: self.margin(MnoId::Two),
            t: q_total + (self.r0 - self.ct0) * s,
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> ModelError {
    ModelError::InvalidParameter {
        name,
        value,
        reason,
    }
}

/// Constants computed once from [`MarketParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// Total customer base `Q = q1 + q2`.
    pub q_total: f64,
    /// Pre-entry market shares; `pi2` is computed as `1 - pi1`.
    pub pi1: f64,
    pub pi2: f64,
    /// Price-weighted base `S = q1/p1 + q2/p2`.
    pub s: f64,
    pub h1: f64,
    pub h2: f64,
    /// `T = Q + (r0 - ct0) S`.
    pub t: f64,
}

impl DerivedQuantities {
    pub fn pi(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.pi1,
            MnoId::Two => self.pi2,
        }
    }

    pub fn h(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.h1,
            MnoId::Two => self.h2,
        }
    }
}

/// Partnership configuration and decision order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Only `partner` leases capacity to the MVNO.
    PartNonPart(MnoId),
    /// Both partner; `leader` sets its wholesale price first.
    PartPartFs(MnoId),
    /// Both partner and set wholesale prices simultaneously.
    PartPartPs,
    /// Nobody partners, so the MVNO never enters.
    NonPartNonPart,
}

impl Scenario {
    pub fn is_partner(&self, mno: MnoId) -> bool {
        match self {
            Scenario::PartNonPart(partner) => *partner == mno,
            Scenario::PartPartFs(_) | Scenario::PartPartPs => true,
            Scenario::NonPartNonPart => false,
        }
    }

    pub fn has_entrant(&self) -> bool {
        !matches!(self, Scenario::NonPartNonPart)
    }

    pub fn leader(&self) -> Option<MnoId> {
        match self {
            Scenario::PartNonPart(partner) => Some(*partner),
            Scenario::PartPartFs(leader) => Some(*leader),
            _ => None,
        }
    }

    /// Short name used on the command line and in CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::PartNonPart(MnoId::One) => "part-nonpart-1",
            Scenario::PartNonPart(MnoId::Two) => "part-nonpart-2",
            Scenario::PartPartFs(_) => "part-part-fs",
            Scenario::PartPartPs => "part-part-ps",
            Scenario::NonPartNonPart => "nonpart-nonpart",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::PartPartFs(leader) => write!(f, "part-part-fs(leader {leader})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Defections and the routing of MVNO traffic at a given retail price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CustomerFlows {
    /// Customers leaving MNO 1 for the MVNO.
    pub d1: f64,
    pub d2: f64,
    /// MVNO customer base `d1 + d2`.
    pub q0: f64,
    pub wifi_traffic: f64,
    pub mno1_traffic: f64,
    pub mno2_traffic: f64,
}

impl CustomerFlows {
    pub fn defection(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.d1,
            MnoId::Two => self.d2,
        }
    }

    pub fn traffic(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.mno1_traffic,
            MnoId::Two => self.mno2_traffic,
        }
    }
}

/// Customers of an operator with base `qi` and price `pi` that move to an
/// MVNO charging `p0`: `eps * qi * (pi - p0) / pi`.
pub fn defection(qi: f64, pi: f64, p0: f64, eps: f64) -> Result<f64, ModelError> {
    if pi.is_nan() || pi <= 0.0 {
        return Err(ModelError::NonPositiveRetailPrice(pi));
    }
    if !(0.0..=pi).contains(&p0) {
        return Err(ModelError::RetailPriceOutOfRange { p0, upper: pi });
    }
    Ok(defection_linear(qi, pi, p0, eps))
}

fn defection_linear(qi: f64, pi: f64, p0: f64, eps: f64) -> f64 {
    eps * qi * (pi - p0) / pi
}

/// Validated parameters together with their derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Market {
    params: MarketParams,
    derived: DerivedQuantities,
    tolerance: f64,
}

impl Market {
    pub fn new(params: MarketParams) -> Result<Self, ModelError> {
        params.validate()?;
        Ok(Market {
            params,
            derived: params.derived(),
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn reference() -> Self {
        Market::new(MarketParams::reference()).expect("reference parameters are valid")
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn derived(&self) -> &DerivedQuantities {
        &self.derived
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Rebuilds the market with a different indirect revenue.
    pub fn with_r0(&self, r0: f64) -> Result<Self, ModelError> {
        Ok(Market::new(self.params.with_r0(r0))?.with_tolerance(self.tolerance))
    }

    /// Fraction of the MVNO's non-WiFi traffic carried by `mno`.
    pub fn traffic_share(&self, scenario: Scenario, mno: MnoId) -> f64 {
        match scenario {
            Scenario::PartNonPart(partner) if partner == mno => 1.0,
            Scenario::PartPartFs(_) | Scenario::PartPartPs => self.derived.pi(mno),
            _ => 0.0,
        }
    }

    pub fn customer_flows(&self, scenario: Scenario, p0: f64) -> Result<CustomerFlows, ModelError> {
        self.check_retail(scenario, p0)?;
        Ok(self.flows_unclamped(scenario, p0))
    }

    pub fn mvno_profit(&self, scenario: Scenario, p0: f64, w: [f64; 2]) -> Result<f64, ModelError> {
        self.check_retail(scenario, p0)?;
        self.check_wholesale(scenario, w)?;
        Ok(self.mvno_profit_unclamped(scenario, p0, w))
    }

    /// Profit of `mno`. In the no-entry scenario `p0` and `w` are ignored.
    pub fn mno_profit(
        &self,
        scenario: Scenario,
        mno: MnoId,
        p0: f64,
        w: [f64; 2],
    ) -> Result<f64, ModelError> {
        if scenario.has_entrant() {
            self.check_retail(scenario, p0)?;
            self.check_wholesale(scenario, w)?;
        }
        Ok(self.mno_profit_unclamped(scenario, mno, p0, w))
    }

    /// Flows with the defection formula extended linearly to any `p0`.
    ///
    /// Outside `[0, p2]` defections can be negative; the oracles rely on this
    /// extension to locate unconstrained stationary points.
    pub fn flows_unclamped(&self, scenario: Scenario, p0: f64) -> CustomerFlows {
        let p = &self.params;
        if !scenario.has_entrant() {
            return CustomerFlows {
                d1: 0.0,
                d2: 0.0,
                q0: 0.0,
                wifi_traffic: 0.0,
                mno1_traffic: 0.0,
                mno2_traffic: 0.0,
            };
        }
        let d1 = defection_linear(p.q1, p.p1, p0, p.eps);
        let d2 = defection_linear(p.q2, p.p2, p0, p.eps);
        let q0 = d1 + d2;
        let carried = (1.0 - p.gamma) * q0;
        CustomerFlows {
            d1,
            d2,
            q0,
            wifi_traffic: p.gamma * q0,
            mno1_traffic: carried * self.traffic_share(scenario, MnoId::One),
            mno2_traffic: carried * self.traffic_share(scenario, MnoId::Two),
        }
    }

    pub fn mvno_profit_unclamped(&self, scenario: Scenario, p0: f64, w: [f64; 2]) -> f64 {
        let p = &self.params;
        let flows = self.flows_unclamped(scenario, p0);
        let unit_wholesale: f64 = MnoId::BOTH
            .iter()
            .map(|&m| self.traffic_share(scenario, m) * w[m.index()])
            .sum();
        (p0 + p.r0) * flows.q0 - (1.0 - p.gamma) * unit_wholesale * flows.q0 - p.ct0 * flows.q0 - p.cf0
    }

    pub fn mno_profit_unclamped(&self, scenario: Scenario, mno: MnoId, p0: f64, w: [f64; 2]) -> f64 {
        let p = &self.params;
        let flows = self.flows_unclamped(scenario, p0);
        let retained = p.q(mno) - flows.defection(mno);
        let mut profit = self.derived.h(mno) * retained - p.cf(mno);
        let share = self.traffic_share(scenario, mno);
        if share > 0.0 {
            profit += (w[mno.index()] - p.c(mno)) * (1.0 - p.gamma) * share * flows.q0;
        }
        profit
    }

    fn check_retail(&self, scenario: Scenario, p0: f64) -> Result<(), ModelError> {
        if !scenario.has_entrant() {
            return Err(ModelError::NoEntrant);
        }
        if !(0.0..=self.params.p2).contains(&p0) {
            return Err(ModelError::RetailPriceOutOfRange {
                p0,
                upper: self.params.p2,
            });
        }
        Ok(())
    }

    fn check_wholesale(&self, scenario: Scenario, w: [f64; 2]) -> Result<(), ModelError> {
        for mno in MnoId::BOTH {
            let value = w[mno.index()];
            if scenario.is_partner(mno) && !value.is_finite() {
                return Err(ModelError::InvalidWholesale { mno, value });
            }
        }
        Ok(())
    }
}
