//! Closed-form optimal prices for every partnership scenario.
//!
//! The MVNO always best-responds to the wholesale prices with
//! `p0 = min(p0_tilde, p2)`. Partner MNOs anticipate that response:
//!
//! * one partner: the partner picks `min(w_bar, w_tilde)`;
//! * two partners, sequential: the leader anticipates the follower's
//!   reaction line, and the optimum sits either on the boundary `delta` of the
//!   admissible region or inside it, depending on `r0` against `r_bar_0`;
//! * two partners, simultaneous: a joint optimum exists only when `r0` is at
//!   least `r0_flat`.

use crate::market::{CustomerFlows, Market, MnoId, Scenario};

/// Critical indirect-revenue levels at which the optimal regime changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Single-partner boundary threshold for partner 1.
    pub r_bar_10: f64,
    pub r_bar_20: f64,
    /// Sequential two-partner threshold.
    pub r_bar_0: f64,
    /// Simultaneous two-partner threshold.
    pub r_flat_0: f64,
}

impl Thresholds {
    pub fn r_bar_i0(&self, mno: MnoId) -> f64 {
        match mno {
            MnoId::One => self.r_bar_10,
            MnoId::Two => self.r_bar_20,
        }
    }
}

pub fn thresholds(m: &Market) -> Thresholds {
    let p = m.params();
    let d = m.derived();
    let q_over_s = d.q_total / d.s;
    let single = |i: MnoId| {
        d.h(i) * p.q(i) / (p.p(i) * d.s) + p.c(i) * (1.0 - p.gamma) + 3.0 * q_over_s + p.ct0 - 4.0 * p.p2
    };
    let common = d.h1 * p.q1 / (p.p1 * d.s)
        + d.h2 * p.q2 / (p.p2 * d.s)
        + (1.0 - p.gamma) * (d.pi1 * p.c1 + d.pi2 * p.c2)
        + p.ct0;
    Thresholds {
        r_bar_10: single(MnoId::One),
        r_bar_20: single(MnoId::Two),
        r_bar_0: common + 7.0 * q_over_s - 8.0 * p.p2,
        r_flat_0: common + 5.0 * q_over_s - 6.0 * p.p2,
    }
}

/// Unconstrained MVNO optimum when a single partner charges `w`.
pub fn p0_tilde_single(m: &Market, w: f64) -> f64 {
    let p = m.params();
    let d = m.derived();
    (1.0 - p.gamma) * w / 2.0 + d.q_total / (2.0 * d.s) + (p.ct0 - p.r0) / 2.0
}

/// Unconstrained MVNO optimum when both partners charge `(w1, w2)`.
pub fn p0_tilde_pair(m: &Market, w1: f64, w2: f64) -> f64 {
    let p = m.params();
    let d = m.derived();
    (1.0 - p.gamma) * (d.pi1 * w1 + d.pi2 * w2) / 2.0 + d.q_total / (2.0 * d.s) + (p.ct0 - p.r0) / 2.0
}

/// Single-partner wholesale price at which the MVNO's optimum reaches `p2`.
/// Independent of which operator partners.
pub fn w_bar_single(m: &Market) -> f64 {
    let p = m.params();
    let d = m.derived();
    (2.0 * p.p2 - d.q_total / d.s + p.r0 - p.ct0) / (1.0 - p.gamma)
}

/// Stationary point of the single partner's anticipated profit.
pub fn w_tilde_single(m: &Market, partner: MnoId) -> f64 {
    let p = m.params();
    let d = m.derived();
    let i = partner;
    p.c(i) / 2.0
        + (d.h(i) * p.q(i) / (2.0 * p.p(i) * d.s) + d.q_total / (2.0 * d.s) + (p.r0 - p.ct0) / 2.0)
            / (1.0 - p.gamma)
}

/// The admissible wholesale region `{w >= 0 : p0_tilde_pair(w) <= p2}` and its
/// boundary line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    /// `d p0_tilde / d w_i`.
    pub coef: [f64; 2],
    /// `p0_tilde(0, 0)`.
    pub offset: f64,
    pub p2: f64,
}

impl Region {
    pub fn of(m: &Market) -> Self {
        let p = m.params();
        let d = m.derived();
        Region {
            coef: [(1.0 - p.gamma) * d.pi1 / 2.0, (1.0 - p.gamma) * d.pi2 / 2.0],
            offset: d.q_total / (2.0 * d.s) + (p.ct0 - p.r0) / 2.0,
            p2: p.p2,
        }
    }

    pub fn p0_tilde(&self, w: [f64; 2]) -> f64 {
        self.coef[0] * w[0] + self.coef[1] * w[1] + self.offset
    }

    /// `p2 - p0_tilde(w)`; non-negative inside the region.
    pub fn slack(&self, w: [f64; 2]) -> f64 {
        self.p2 - self.p0_tilde(w)
    }

    pub fn contains(&self, w: [f64; 2], tol: f64) -> bool {
        w[0] >= -tol && w[1] >= -tol && self.slack(w) >= -tol
    }

    pub fn on_boundary(&self, w: [f64; 2], tol: f64) -> bool {
        self.contains(w, tol) && self.slack(w).abs() <= tol
    }

    pub fn is_empty(&self) -> bool {
        self.p2 < self.offset
    }

    /// Where the boundary meets the axis of `mno` (other price zero).
    pub fn intercept(&self, mno: MnoId) -> f64 {
        (self.p2 - self.offset) / self.coef[mno.index()]
    }
}

/// Follower reaction line: the stationary wholesale price of MNO `-leader`
/// when the leader charges `w_leader`.
pub fn omega_follower(m: &Market, leader: MnoId, w_leader: f64) -> f64 {
    let p = m.params();
    let d = m.derived();
    let f = leader.other();
    let pf = d.pi(f);
    let g1 = 1.0 - p.gamma;
    p.c(f) / 2.0 + d.h(f) * p.q(f) / (2.0 * p.p(f) * g1 * pf * d.s) + d.q_total / (2.0 * g1 * pf * d.s)
        - (p.ct0 - p.r0) / (2.0 * g1 * pf)
        - d.pi(leader) / (2.0 * pf) * w_leader
}

/// Interior stationary price of the sequential leader.
pub fn w_tilde_leader(m: &Market, leader: MnoId) -> f64 {
    let p = m.params();
    let d = m.derived();
    let (i, f) = (leader, leader.other());
    let num = d.h(i) * p.q(i) / p.p(i) - d.h(f) * p.q(f) / p.p(f)
        + d.s * (1.0 - p.gamma) * (p.c(i) * d.pi(i) - p.c(f) * d.pi(f))
        + d.t;
    num / (2.0 * (1.0 - p.gamma) * d.pi(i) * d.s)
}

/// Largest leader price for which the follower's reaction stays admissible.
///
/// Not to be confused with [`w_bar_single`], the single-partner bound.
pub fn w_bar_leader(m: &Market, leader: MnoId) -> f64 {
    let p = m.params();
    let d = m.derived();
    let (i, f) = (leader, leader.other());
    let num = -d.h(f) * p.q(f) / p.p(f) - p.c(f) * (1.0 - p.gamma) * d.pi(f) * d.s - 4.0 * d.q_total
        + 4.0 * p.p2 * d.s
        + d.t;
    num / ((1.0 - p.gamma) * d.pi(i) * d.s)
}

/// Follower coordinate of the boundary optimum when `leader` leads.
fn follower_on_boundary(m: &Market, leader: MnoId) -> f64 {
    let p = m.params();
    let d = m.derived();
    let f = leader.other();
    let num = d.h(f) * p.q(f) / p.p(f) + p.c(f) * (1.0 - p.gamma) * d.pi(f) * d.s + 2.0 * d.q_total
        - 2.0 * d.s * p.p2;
    num / ((1.0 - p.gamma) * d.pi(f) * d.s)
}

fn boundary_point(m: &Market, leader: MnoId) -> [f64; 2] {
    let mut w = [0.0; 2];
    w[leader.index()] = w_bar_leader(m, leader);
    w[leader.other().index()] = follower_on_boundary(m, leader);
    w
}

/// Boundary optimum when MNO 2 leads.
pub fn point_wa(m: &Market) -> [f64; 2] {
    boundary_point(m, MnoId::Two)
}

/// Boundary optimum when MNO 1 leads.
pub fn point_wb(m: &Market) -> [f64; 2] {
    boundary_point(m, MnoId::One)
}

/// Interior optimum `(w_tilde_leader, omega_follower(w_tilde_leader))`.
pub fn interior_leader_point(m: &Market, leader: MnoId) -> [f64; 2] {
    let wl = w_tilde_leader(m, leader);
    let mut w = [0.0; 2];
    w[leader.index()] = wl;
    w[leader.other().index()] = omega_follower(m, leader, wl);
    w
}

/// Joint stationary point of both partners' anticipated profits.
pub fn point_wc(m: &Market) -> [f64; 2] {
    let p = m.params();
    let d = m.derived();
    let coord = |i: MnoId| {
        let f = i.other();
        let num = 2.0 * d.h(i) * p.q(i) / p.p(i) - d.h(f) * p.q(f) / p.p(f)
            + (1.0 - p.gamma) * (2.0 * p.c(i) * d.pi(i) - p.c(f) * d.pi(f)) * d.s
            + d.t;
        num / (3.0 * (1.0 - p.gamma) * d.pi(i) * d.s)
    };
    [coord(MnoId::One), coord(MnoId::Two)]
}

/// Remarks attached to a solution when a formula leaves its natural domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagnostic {
    NegativeWholesale { mno: MnoId, value: f64 },
    /// The unconstrained retail optimum was negative and has been set to 0.
    RetailClampedToZero { unclamped: f64 },
}

/// Optimal prices, flows and profits of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSolution {
    pub scenario: Scenario,
    /// `None` for operators that do not partner, or when infeasible.
    pub wholesale: [Option<f64>; 2],
    pub p0: Option<f64>,
    /// Whether `p0` sits at `p2`.
    pub boundary: bool,
    pub flows: Option<CustomerFlows>,
    pub profit_mvno: Option<f64>,
    pub profit_mno1: Option<f64>,
    pub profit_mno2: Option<f64>,
    /// False only when simultaneous pricing has no solution.
    pub feasible: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl PriceSolution {
    /// Wholesale vector with absent prices read as zero.
    pub fn w(&self) -> [f64; 2] {
        [self.wholesale[0].unwrap_or(0.0), self.wholesale[1].unwrap_or(0.0)]
    }

    pub fn profit_mno(&self, mno: MnoId) -> Option<f64> {
        match mno {
            MnoId::One => self.profit_mno1,
            MnoId::Two => self.profit_mno2,
        }
    }

    pub fn leader(&self) -> Option<MnoId> {
        self.scenario.leader()
    }
}

pub fn solve(m: &Market, scenario: Scenario) -> PriceSolution {
    match scenario {
        Scenario::PartNonPart(partner) => solve_part_nonpart(m, partner),
        Scenario::PartPartFs(leader) => solve_part_part_fs(m, leader),
        Scenario::PartPartPs => solve_part_part_ps(m),
        Scenario::NonPartNonPart => solve_nonpart_nonpart(m),
    }
}

pub fn solve_part_nonpart(m: &Market, partner: MnoId) -> PriceSolution {
    let w_bar = w_bar_single(m);
    let w_tilde = w_tilde_single(m, partner);
    // Equality belongs to the boundary branch.
    let (w_hat, p0_unclamped) = if w_bar <= w_tilde {
        (w_bar, m.params().p2)
    } else {
        (w_tilde, p0_tilde_single(m, w_tilde))
    };
    let mut w = [None, None];
    w[partner.index()] = Some(w_hat);
    assemble(m, Scenario::PartNonPart(partner), w, p0_unclamped)
}

pub fn solve_part_part_fs(m: &Market, leader: MnoId) -> PriceSolution {
    let t = thresholds(m);
    let scenario = Scenario::PartPartFs(leader);
    if m.params().r0 <= t.r_bar_0 + m.tolerance() {
        let w = boundary_point(m, leader);
        assemble(m, scenario, [Some(w[0]), Some(w[1])], m.params().p2)
    } else {
        let w = interior_leader_point(m, leader);
        assemble(m, scenario, [Some(w[0]), Some(w[1])], p0_tilde_pair(m, w[0], w[1]))
    }
}

pub fn solve_part_part_ps(m: &Market) -> PriceSolution {
    let t = thresholds(m);
    let r0 = m.params().r0;
    let w = point_wc(m);
    if (r0 - t.r_flat_0).abs() <= m.tolerance() {
        assemble(m, Scenario::PartPartPs, [Some(w[0]), Some(w[1])], m.params().p2)
    } else if r0 > t.r_flat_0 {
        assemble(m, Scenario::PartPartPs, [Some(w[0]), Some(w[1])], p0_tilde_pair(m, w[0], w[1]))
    } else {
        PriceSolution {
            scenario: Scenario::PartPartPs,
            wholesale: [None, None],
            p0: None,
            boundary: false,
            flows: None,
            profit_mvno: None,
            profit_mno1: None,
            profit_mno2: None,
            feasible: false,
            diagnostics: Vec::new(),
        }
    }
}

pub fn solve_nonpart_nonpart(m: &Market) -> PriceSolution {
    let s = Scenario::NonPartNonPart;
    let profit = |mno| m.mno_profit_unclamped(s, mno, 0.0, [0.0; 2]);
    PriceSolution {
        scenario: s,
        wholesale: [None, None],
        p0: None,
        boundary: false,
        flows: None,
        profit_mvno: None,
        profit_mno1: Some(profit(MnoId::One)),
        profit_mno2: Some(profit(MnoId::Two)),
        feasible: true,
        diagnostics: Vec::new(),
    }
}

fn assemble(m: &Market, scenario: Scenario, wholesale: [Option<f64>; 2], p0_unclamped: f64) -> PriceSolution {
    let p2 = m.params().p2;
    let mut diagnostics = Vec::new();
    for mno in MnoId::BOTH {
        if let Some(value) = wholesale[mno.index()] {
            if value < 0.0 {
                diagnostics.push(Diagnostic::NegativeWholesale { mno, value });
            }
        }
    }
    let mut p0 = p0_unclamped.min(p2);
    if p0 < 0.0 {
        diagnostics.push(Diagnostic::RetailClampedToZero { unclamped: p0 });
        p0 = 0.0;
    }
    let w = [wholesale[0].unwrap_or(0.0), wholesale[1].unwrap_or(0.0)];
    let flows = m.flows_unclamped(scenario, p0);
    PriceSolution {
        scenario,
        wholesale,
        p0: Some(p0),
        boundary: (p0 - p2).abs() <= m.tolerance(),
        flows: Some(flows),
        profit_mvno: Some(m.mvno_profit_unclamped(scenario, p0, w)),
        profit_mno1: Some(m.mno_profit_unclamped(scenario, MnoId::One, p0, w)),
        profit_mno2: Some(m.mno_profit_unclamped(scenario, MnoId::Two, p0, w)),
        feasible: true,
        diagnostics,
    }
}
