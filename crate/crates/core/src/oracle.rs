//! Independent verification of the closed-form optima.
//!
//! Three families of checks live here:
//!
//! * brute-force searches that re-solve each pricing problem with the grid
//!   search of [`crate::grid`] and compare against [`crate::solvers`];
//! * KKT residuals evaluated with central finite differences;
//! * the two case analyses behind the sequential and simultaneous results
//!   (follower pushed to zero along the boundary, affine payoffs along the
//!   boundary segment).
//!
//! The brute-force searches optimise over the admissible region only: a
//! wholesale vector whose induced MVNO optimum exceeds `p2` is treated as
//! infeasible, since past that point partner revenue grows without bound
//! while the MVNO's profit collapses. To decide admissibility, profits are
//! evaluated with the linear extension of the defection formula (see
//! [`Market::flows_unclamped`]).

use std::fmt;

use crate::error::OracleError;
use crate::grid::{self, GridSpec};
use crate::market::{Market, MnoId, Scenario};
use crate::solvers::{self, PriceSolution, Region};

/// Relative tolerances of the brute-force comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTolerance {
    pub price: f64,
    pub profit: f64,
}

impl Default for OracleTolerance {
    fn default() -> Self {
        OracleTolerance {
            price: 1e-3,
            profit: 1e-4,
        }
    }
}

/// Which regime an optimum belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// MVNO price pinned at `p2`.
    Boundary,
    /// MVNO price strictly below `p2`.
    Interior,
    /// No simultaneous optimum exists.
    NoSolution,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Boundary => "boundary",
            Branch::Interior => "interior",
            Branch::NoSolution => "no-solution",
        })
    }
}

/// One closed-form quantity against its brute-force counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub label: &'static str,
    pub closed_form: f64,
    pub oracle: f64,
    /// `|oracle - closed_form| / max(|closed_form|, floor)`.
    pub gap: f64,
    pub tolerance: f64,
}

impl Comparison {
    fn new(label: &'static str, closed_form: f64, oracle: f64, floor: f64, tolerance: f64) -> Self {
        Comparison {
            label,
            closed_form,
            oracle,
            gap: relative_gap(oracle, closed_form, floor),
            tolerance,
        }
    }

    pub fn pass(&self) -> bool {
        self.gap <= self.tolerance
    }
}

/// Outcome of a brute-force cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleVerdict {
    pub check: String,
    pub closed_form_branch: Branch,
    pub oracle_branch: Branch,
    pub comparisons: Vec<Comparison>,
    pub max_gap: f64,
    pub pass: bool,
}

impl OracleVerdict {
    fn new(check: String, closed_form_branch: Branch, oracle_branch: Branch, comparisons: Vec<Comparison>) -> Self {
        let max_gap = comparisons.iter().map(|c| c.gap).fold(0.0, f64::max);
        let pass = closed_form_branch == oracle_branch && comparisons.iter().all(Comparison::pass);
        OracleVerdict {
            check,
            closed_form_branch,
            oracle_branch,
            comparisons,
            max_gap,
            pass,
        }
    }

    pub fn comparison(&self, label: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.label == label)
    }
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] branch closed-form={} oracle={} max_gap={:.3e}",
            self.check,
            if self.pass { "pass" } else { "FAIL" },
            self.closed_form_branch,
            self.oracle_branch,
            self.max_gap
        )?;
        for c in &self.comparisons {
            write!(
                f,
                "\n  {:<14} closed={:<16.10} oracle={:<16.10} gap={:.3e} tol={:.1e}",
                c.label, c.closed_form, c.oracle, c.gap, c.tolerance
            )?;
        }
        Ok(())
    }
}

pub fn relative_gap(value: f64, reference: f64, floor: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(floor)
}

/// Upper bounds of the wholesale search for `scenario`, one per MNO: four
/// times the largest admissible price of that MNO (the single-partner bound,
/// or the region's intercept on its axis), and for simultaneous pricing also
/// its coordinate of the stationary point, which may lie outside the region.
pub fn search_bound(m: &Market, scenario: Scenario) -> [f64; 2] {
    let region = Region::of(m);
    let wc = solvers::point_wc(m);
    MnoId::BOTH.map(|i| {
        let reach = match scenario {
            Scenario::PartNonPart(_) => solvers::w_bar_single(m),
            Scenario::PartPartFs(_) => region.intercept(i),
            Scenario::PartPartPs => region.intercept(i).max(wc[i.index()].abs()),
            Scenario::NonPartNonPart => 0.0,
        };
        4.0 * reach.max(1.0)
    })
}

/// Grid maximiser of the MVNO profit over `p0 in [0, p2]` for fixed `w`.
pub fn grid_argmax_p0(m: &Market, scenario: Scenario, w: [f64; 2], spec: &GridSpec) -> Result<(f64, f64), OracleError> {
    if !scenario.has_entrant() {
        return Err(crate::error::ModelError::NoEntrant.into());
    }
    let p2 = m.params().p2;
    let best = grid::argmax(|p0| m.mvno_profit_unclamped(scenario, p0, w), 0.0, p2, spec)?
        .expect("MVNO profit is finite on [0, p2]");
    Ok((best.x, best.value))
}

fn price_floor(m: &Market) -> f64 {
    m.params().p2
}

fn profit_floor(m: &Market) -> f64 {
    let p = m.params();
    1e-3 * (p.p1 * p.q1 + p.p2 * p.q2)
}

fn classify(at_edge: bool) -> Branch {
    if at_edge {
        Branch::Boundary
    } else {
        Branch::Interior
    }
}

fn branch_of(sol: &PriceSolution) -> Branch {
    if !sol.feasible {
        Branch::NoSolution
    } else if sol.boundary {
        Branch::Boundary
    } else {
        Branch::Interior
    }
}

fn check_region(m: &Market) -> Result<Region, OracleError> {
    let region = Region::of(m);
    if region.is_empty() {
        return Err(OracleError::EmptyRegion);
    }
    Ok(region)
}

/// Nested search for the single-partner problem: the partner's price on the
/// outer grid, the MVNO's unconstrained response on the inner grid.
pub fn part_nonpart_oracle(m: &Market, partner: MnoId, spec: &GridSpec) -> Result<OracleVerdict, OracleError> {
    let closed = solvers::solve_part_nonpart(m, partner);
    part_nonpart_oracle_against(m, partner, &closed, spec, &OracleTolerance::default())
}

pub fn part_nonpart_oracle_against(
    m: &Market,
    partner: MnoId,
    closed: &PriceSolution,
    spec: &GridSpec,
    tol: &OracleTolerance,
) -> Result<OracleVerdict, OracleError> {
    check_region(m)?;
    let scenario = Scenario::PartNonPart(partner);
    let p2 = m.params().p2;
    let upper = search_bound(m, scenario)[partner.index()];
    let vector = |x: f64| {
        let mut w = [0.0; 2];
        w[partner.index()] = x;
        w
    };
    // MVNO response without the p2 cap; admissible iff it stays below p2.
    let response = |x: f64| -> Option<f64> {
        let w = vector(x);
        let best = grid::argmax(|p0| m.mvno_profit_unclamped(scenario, p0, w), 0.0, 2.0 * p2, spec)
            .ok()??;
        (best.x <= p2).then_some(best.x)
    };
    let objective = |x: f64| match response(x) {
        Some(p0) => m.mno_profit_unclamped(scenario, partner, p0, vector(x)),
        None => f64::NEG_INFINITY,
    };
    let best = grid::argmax(objective, 0.0, upper, spec)?.ok_or(OracleError::EmptyRegion)?;
    let probe = 10.0 * spec.final_step(upper);
    let at_edge = response(best.x + probe).is_none();

    let w = vector(best.x);
    let (p0, _) = grid_argmax_p0(m, scenario, w, spec)?;
    let profit = m.mno_profit_unclamped(scenario, partner, p0, w);

    let cw = closed.wholesale[partner.index()].unwrap_or(f64::NAN);
    let cp0 = closed.p0.unwrap_or(f64::NAN);
    let cprofit = closed.profit_mno(partner).unwrap_or(f64::NAN);
    let comparisons = vec![
        Comparison::new("w", cw, best.x, price_floor(m), tol.price),
        Comparison::new("p0", cp0, p0, price_floor(m), tol.price),
        Comparison::new("profit_mno", cprofit, profit, profit_floor(m), tol.profit),
    ];
    Ok(OracleVerdict::new(
        format!("part-nonpart-{partner} brute force"),
        branch_of(closed),
        classify(at_edge),
        comparisons,
    ))
}

/// Anticipated profit of `mno` when both partners charge `w` and the MVNO
/// plays its unconstrained optimum.
fn pair_profit(m: &Market, scenario: Scenario, mno: MnoId, w: [f64; 2]) -> f64 {
    let p0 = solvers::p0_tilde_pair(m, w[0], w[1]);
    m.mno_profit_unclamped(scenario, mno, p0, w)
}

fn with_coord(w: [f64; 2], mno: MnoId, x: f64) -> [f64; 2] {
    let mut out = w;
    out[mno.index()] = x;
    out
}

/// Bilevel search for the sequential game: leader price on the outer grid,
/// follower best response on the inner grid, then the MVNO's price by grid.
///
/// Leader prices for which the follower's best response leaves the
/// admissible region are rejected.
pub fn bilevel_fs_oracle(m: &Market, leader: MnoId, spec: &GridSpec) -> Result<OracleVerdict, OracleError> {
    let closed = solvers::solve_part_part_fs(m, leader);
    bilevel_fs_oracle_against(m, leader, &closed, spec, &OracleTolerance::default())
}

pub fn bilevel_fs_oracle_against(
    m: &Market,
    leader: MnoId,
    closed: &PriceSolution,
    spec: &GridSpec,
    tol: &OracleTolerance,
) -> Result<OracleVerdict, OracleError> {
    let region = check_region(m)?;
    let scenario = Scenario::PartPartFs(leader);
    let follower = leader.other();
    let upper = search_bound(m, scenario);

    let follow = |x: f64| -> Option<[f64; 2]> {
        let base = with_coord([0.0; 2], leader, x);
        let best = grid::argmax(
            |y| pair_profit(m, scenario, follower, with_coord(base, follower, y)),
            0.0,
            upper[follower.index()],
            spec,
        )
        .ok()??;
        let w = with_coord(base, follower, best.x);
        (region.slack(w) >= 0.0).then_some(w)
    };
    let objective = |x: f64| match follow(x) {
        Some(w) => pair_profit(m, scenario, leader, w),
        None => f64::NEG_INFINITY,
    };
    let best = grid::argmax(objective, 0.0, upper[leader.index()], spec)?.ok_or(OracleError::EmptyRegion)?;
    let w = follow(best.x).ok_or(OracleError::EmptyRegion)?;
    let probe = 10.0 * spec.final_step(upper[leader.index()]);
    let at_edge = follow(best.x + probe).is_none();

    let (p0, _) = grid_argmax_p0(m, scenario, w, spec)?;
    let profit = m.mno_profit_unclamped(scenario, leader, p0, w);

    let cw = closed.w();
    let comparisons = vec![
        Comparison::new("w_leader", cw[leader.index()], w[leader.index()], price_floor(m), tol.price),
        Comparison::new("w_follower", cw[follower.index()], w[follower.index()], price_floor(m), tol.price),
        Comparison::new("p0", closed.p0.unwrap_or(f64::NAN), p0, price_floor(m), tol.price),
        Comparison::new(
            "profit_leader",
            closed.profit_mno(leader).unwrap_or(f64::NAN),
            profit,
            profit_floor(m),
            tol.profit,
        ),
    ];
    Ok(OracleVerdict::new(
        format!("part-part-fs leader {leader} bilevel search"),
        branch_of(closed),
        classify(at_edge),
        comparisons,
    ))
}

/// Settings of the damped best-response iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponseSettings {
    pub damping: f64,
    pub max_iterations: usize,
    /// Movement tolerance relative to the price scale.
    pub movement_tolerance: f64,
}

impl Default for BestResponseSettings {
    fn default() -> Self {
        BestResponseSettings {
            damping: 0.5,
            max_iterations: 500,
            movement_tolerance: 1e-8,
        }
    }
}

/// Result of the simultaneous-pricing fixed-point search.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointSearch {
    /// Last iterate.
    pub point: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
    /// `p2 - p0_tilde(point)`; negative when the iterate left the region.
    pub slack: f64,
    /// Slack magnitude, in retail-price units, below which the fixed point
    /// counts as on the boundary.
    pub boundary_tolerance: f64,
}

impl FixedPointSearch {
    pub fn branch(&self) -> Branch {
        if !self.converged || self.slack < -self.boundary_tolerance {
            Branch::NoSolution
        } else if self.slack <= self.boundary_tolerance {
            Branch::Boundary
        } else {
            Branch::Interior
        }
    }
}

/// Damped simultaneous best-response iteration, each best response found by
/// grid search.
pub fn best_response_iteration(
    m: &Market,
    spec: &GridSpec,
    settings: &BestResponseSettings,
) -> Result<FixedPointSearch, OracleError> {
    let region = check_region(m)?;
    let scenario = Scenario::PartPartPs;
    let upper = search_bound(m, scenario);
    let steps = upper.map(|u| spec.final_step(u));
    let movement_tol = (settings.movement_tolerance * upper[0].max(upper[1]) / 4.0).max(steps[0].max(steps[1]));
    // slack moved by ten grid steps in each coordinate
    let boundary_tolerance = 10.0 * (region.coef[0].abs() * steps[0] + region.coef[1].abs() * steps[1]);

    let respond = |w: [f64; 2], mno: MnoId| -> Result<f64, OracleError> {
        let best = grid::argmax(
            |x| pair_profit(m, scenario, mno, with_coord(w, mno, x)),
            0.0,
            upper[mno.index()],
            spec,
        )?
            .expect("anticipated profit is finite");
        Ok(best.x)
    };

    let mut w = [0.0, 0.0];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < settings.max_iterations {
        iterations += 1;
        let target = [respond(w, MnoId::One)?, respond(w, MnoId::Two)?];
        let next = [
            w[0] + settings.damping * (target[0] - w[0]),
            w[1] + settings.damping * (target[1] - w[1]),
        ];
        let movement = (next[0] - w[0]).abs().max((next[1] - w[1]).abs());
        w = next;
        if movement <= movement_tol {
            converged = true;
            break;
        }
    }
    Ok(FixedPointSearch {
        point: w,
        iterations,
        converged,
        slack: region.slack(w),
        boundary_tolerance,
    })
}

/// Simultaneous-pricing check: the fixed point of best responses should be
/// the joint stationary point, inside the region exactly when a solution is
/// claimed.
pub fn simultaneous_ps_oracle(m: &Market, spec: &GridSpec) -> Result<OracleVerdict, OracleError> {
    let closed = solvers::solve_part_part_ps(m);
    simultaneous_ps_oracle_against(m, &closed, spec, &OracleTolerance::default())
}

pub fn simultaneous_ps_oracle_against(
    m: &Market,
    closed: &PriceSolution,
    spec: &GridSpec,
    tol: &OracleTolerance,
) -> Result<OracleVerdict, OracleError> {
    let search = best_response_iteration(m, spec, &BestResponseSettings::default())?;
    // The stationary point exists whether or not it is admissible.
    let wc = if closed.feasible { closed.w() } else { solvers::point_wc(m) };
    let comparisons = vec![
        Comparison::new("w1", wc[0], search.point[0], price_floor(m), tol.price),
        Comparison::new("w2", wc[1], search.point[1], price_floor(m), tol.price),
    ];
    // The closed-form boundary case is detected with the solver's tolerance;
    // the grid cannot resolve the slack more finely than its step.
    let closed_branch = match branch_of(closed) {
        Branch::Interior if -Region::of(m).slack(wc) >= -search.boundary_tolerance => Branch::Boundary,
        b => b,
    };
    Ok(OracleVerdict::new(
        format!("part-part-ps best-response fixed point ({} iterations)", search.iterations),
        closed_branch,
        search.branch(),
        comparisons,
    ))
}

/// Central finite difference with step `1e-5 * max(1, |x|)`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Three-point second difference. The objectives are quadratic, so a wide
/// step loses nothing to truncation and limits rounding error.
pub fn second_difference<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-2 * x.abs().max(1.0);
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Tolerances of the KKT reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktTolerance {
    /// Stationarity residual relative to the customer base `Q`.
    pub stationarity: f64,
    /// Lowest admissible multiplier, relative to `Q`.
    pub multiplier: f64,
    /// `|lambda * slack|` relative to the retail revenue `p1 q1 + p2 q2`.
    pub slackness: f64,
    /// Slack (relative to `p2`) below which the constraint counts as active.
    pub active: f64,
}

impl Default for KktTolerance {
    fn default() -> Self {
        KktTolerance {
            stationarity: 1e-6,
            multiplier: 1e-9,
            slackness: 1e-9,
            active: 1e-9,
        }
    }
}

/// First-order optimality of one or more decision makers at a candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub labels: Vec<&'static str>,
    /// Relative stationarity residual per decision maker.
    pub stationarity: Vec<f64>,
    /// Multiplier of each decision maker's constraint, in subscribers.
    pub multipliers: Vec<f64>,
    /// Relative complementary-slackness residual.
    pub complementary_slackness: Vec<f64>,
    /// Smallest `p2 - p0_tilde` over the decision makers' constraints.
    pub feasibility_margin: f64,
    pub active: bool,
    pub satisfied: bool,
}

struct Stationarity {
    label: &'static str,
    derivative: f64,
    constraint_gradient: f64,
    slack: f64,
}

impl KktReport {
    fn assemble(m: &Market, parts: Vec<Stationarity>, tol: &KktTolerance) -> Self {
        let q = m.derived().q_total;
        let p = m.params();
        let revenue = p.p1 * p.q1 + p.p2 * p.q2;
        let active_tol = tol.active * p.p2;
        let mut report = KktReport {
            labels: Vec::new(),
            stationarity: Vec::new(),
            multipliers: Vec::new(),
            complementary_slackness: Vec::new(),
            feasibility_margin: f64::INFINITY,
            active: false,
            satisfied: true,
        };
        for part in parts {
            let (lambda, residual) = if part.slack.abs() <= active_tol {
                report.active = true;
                (part.derivative / part.constraint_gradient, 0.0)
            } else {
                (0.0, part.derivative.abs() / q)
            };
            let slackness = (lambda * part.slack).abs() / revenue;
            report.satisfied &= residual <= tol.stationarity
                && lambda >= -tol.multiplier * q
                && slackness <= tol.slackness
                && part.slack >= -active_tol;
            report.labels.push(part.label);
            report.stationarity.push(residual);
            report.multipliers.push(lambda);
            report.complementary_slackness.push(slackness);
            report.feasibility_margin = report.feasibility_margin.min(part.slack);
        }
        report
    }
}

impl fmt::Display for KktReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.satisfied { "satisfied" } else { "violated" })?;
        for (k, label) in self.labels.iter().enumerate() {
            write!(
                f,
                "; {label}: residual {:.3e}, multiplier {:.6}, slackness {:.3e}",
                self.stationarity[k], self.multipliers[k], self.complementary_slackness[k]
            )?;
        }
        write!(f, "; margin {:.3e}", self.feasibility_margin)
    }
}

/// MVNO retail problem at fixed wholesale prices, constraint `p0 <= p2`.
pub fn kkt_residuals_retail(m: &Market, scenario: Scenario, w: [f64; 2], p0: f64, tol: &KktTolerance) -> KktReport {
    let part = Stationarity {
        label: "mvno",
        derivative: central_difference(|x| m.mvno_profit_unclamped(scenario, x, w), p0),
        constraint_gradient: 1.0,
        slack: m.params().p2 - p0,
    };
    KktReport::assemble(m, vec![part], tol)
}

/// Single partner's wholesale problem, constraint `p0_tilde(w) <= p2`.
pub fn kkt_residuals_part_nonpart(m: &Market, partner: MnoId, w: f64, tol: &KktTolerance) -> KktReport {
    let scenario = Scenario::PartNonPart(partner);
    let profit = |x: f64| {
        let v = with_coord([0.0; 2], partner, x);
        m.mno_profit_unclamped(scenario, partner, solvers::p0_tilde_single(m, x), v)
    };
    let part = Stationarity {
        label: "partner",
        derivative: central_difference(profit, w),
        constraint_gradient: central_difference(|x| solvers::p0_tilde_single(m, x), w),
        slack: m.params().p2 - solvers::p0_tilde_single(m, w),
    };
    KktReport::assemble(m, vec![part], tol)
}

/// Sequential game at `candidate`: the follower's problem given the
/// leader's price, and the leader's problem along the follower's reaction
/// line.
pub fn kkt_residuals_fs(m: &Market, leader: MnoId, candidate: [f64; 2], tol: &KktTolerance) -> KktReport {
    let scenario = Scenario::PartPartFs(leader);
    let follower = leader.other();
    let region = Region::of(m);

    let fy = candidate[follower.index()];
    let follower_part = Stationarity {
        label: "follower",
        derivative: central_difference(
            |y| pair_profit(m, scenario, follower, with_coord(candidate, follower, y)),
            fy,
        ),
        constraint_gradient: region.coef[follower.index()],
        slack: region.slack(candidate),
    };

    let on_line = |x: f64| {
        let w = with_coord([0.0; 2], leader, x);
        with_coord(w, follower, solvers::omega_follower(m, leader, x))
    };
    let lx = candidate[leader.index()];
    let leader_part = Stationarity {
        label: "leader",
        derivative: central_difference(|x| pair_profit(m, scenario, leader, on_line(x)), lx),
        constraint_gradient: central_difference(|x| region.p0_tilde(on_line(x)), lx),
        slack: region.slack(on_line(lx)),
    };
    KktReport::assemble(m, vec![follower_part, leader_part], tol)
}

/// Simultaneous game at `candidate`: each partner's own problem, each with
/// its own multiplier.
pub fn kkt_residuals_ps(m: &Market, candidate: [f64; 2], tol: &KktTolerance) -> PsKktReport {
    let scenario = Scenario::PartPartPs;
    let region = Region::of(m);
    let parts = MnoId::BOTH
        .iter()
        .map(|&i| Stationarity {
            label: if i == MnoId::One { "mno1" } else { "mno2" },
            derivative: central_difference(
                |x| pair_profit(m, scenario, i, with_coord(candidate, i, x)),
                candidate[i.index()],
            ),
            constraint_gradient: region.coef[i.index()],
            slack: region.slack(candidate),
        })
        .collect();
    let report = KktReport::assemble(m, parts, tol);
    let expected_sum = multiplier_sum(m);
    let identity_gap = report.active.then(|| {
        let sum = report.multipliers[0] + report.multipliers[1];
        let p = m.params();
        let scale = p.eps * m.derived().s * p.p2;
        relative_gap(sum, expected_sum, scale)
    });
    PsKktReport {
        report,
        expected_multiplier_sum: expected_sum,
        identity_gap,
    }
}

/// `eps * S * (r0_flat - r0)`, the total multiplier along the boundary.
pub fn multiplier_sum(m: &Market) -> f64 {
    let t = solvers::thresholds(m);
    m.params().eps * m.derived().s * (t.r_flat_0 - m.params().r0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsKktReport {
    pub report: KktReport,
    pub expected_multiplier_sum: f64,
    /// Relative gap of `lambda1 + lambda2` to its closed form, when active.
    pub identity_gap: Option<f64>,
}

/// A finite-difference curvature against its analytic constant.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureCheck {
    pub name: String,
    pub finite_difference: f64,
    pub expected: f64,
    pub gap: f64,
}

/// Second derivatives of the four concave problems at their optima.
pub fn curvature_checks(m: &Market) -> Vec<CurvatureCheck> {
    let p = m.params();
    let d = m.derived();
    let g1 = 1.0 - p.gamma;
    let mut out = Vec::new();
    let mut push = |name: String, fd: f64, expected: f64| {
        out.push(CurvatureCheck {
            gap: relative_gap(fd, expected, 0.0),
            name,
            finite_difference: fd,
            expected,
        })
    };

    let s1 = Scenario::PartNonPart(MnoId::One);
    let w = [solvers::w_tilde_single(m, MnoId::One), 0.0];
    push(
        "retail p0".into(),
        second_difference(|x| m.mvno_profit_unclamped(s1, x, w), p.p2 / 2.0),
        -2.0 * p.eps * d.s,
    );

    for i in MnoId::BOTH {
        let s = Scenario::PartNonPart(i);
        let at = solvers::w_tilde_single(m, i);
        let fd = second_difference(
            |x| m.mno_profit_unclamped(s, i, solvers::p0_tilde_single(m, x), with_coord([0.0; 2], i, x)),
            at,
        );
        push(format!("part-nonpart-{i} wholesale"), fd, -p.eps * g1 * g1 * d.s);
    }

    for leader in MnoId::BOTH {
        let s = Scenario::PartPartFs(leader);
        let on_line = |x: f64| {
            let w = with_coord([0.0; 2], leader, x);
            with_coord(w, leader.other(), solvers::omega_follower(m, leader, x))
        };
        let at = solvers::w_tilde_leader(m, leader);
        let fd = second_difference(|x| pair_profit(m, s, leader, on_line(x)), at);
        let pi = d.pi(leader);
        push(format!("fs leader {leader}"), fd, -p.eps * g1 * g1 * pi * pi * d.s / 2.0);
    }

    let wc = solvers::point_wc(m);
    for i in MnoId::BOTH {
        let fd = second_difference(
            |x| pair_profit(m, Scenario::PartPartPs, i, with_coord(wc, i, x)),
            wc[i.index()],
        );
        let pi = d.pi(i);
        push(format!("ps mno {i}"), fd, -p.eps * g1 * g1 * pi * pi * d.s);
    }
    out
}

/// Follower price on the boundary line as a function of the leader's price.
pub fn omega_bar_follower(m: &Market, leader: MnoId, w_leader: f64) -> f64 {
    let p = m.params();
    let d = m.derived();
    let g1 = 1.0 - p.gamma;
    let num = -g1 * d.pi(leader) * d.s * w_leader - d.q_total - d.s * (p.ct0 - p.r0) + 2.0 * d.s * p.p2;
    num / (d.s * g1 * d.pi(leader.other()))
}

/// Follower's multiplier along the boundary line.
pub fn lambda_follower(m: &Market, leader: MnoId, w_leader: f64) -> f64 {
    let p = m.params();
    let d = m.derived();
    let f = leader.other();
    let g1 = 1.0 - p.gamma;
    let es = p.eps * d.s;
    es * g1 * d.pi(leader) * w_leader + p.eps * d.h(f) * p.q(f) / p.p(f) + 3.0 * p.eps * d.q_total
        + es * (p.ct0 - p.r0)
        + es * p.c(f) * g1 * d.pi(f)
        - 4.0 * es * p.p2
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySample {
    pub w_leader: f64,
    pub w_follower: f64,
    /// Finite-difference slope of the leader's profit along the boundary.
    pub derivative: f64,
    /// `pi_leader (1 - gamma) Q0` at `p0 = p2`.
    pub expected: f64,
    /// Multiplier recovered from the follower's stationarity condition.
    pub lambda: f64,
    /// Closed-form multiplier on the boundary.
    pub lambda_closed_form: f64,
}

/// Constrained-follower branch of the sequential game.
#[derive(Debug, Clone, PartialEq)]
pub struct Case2Report {
    pub leader: MnoId,
    pub samples: Vec<BoundarySample>,
    pub max_slope_gap: f64,
    pub max_lambda_gap: f64,
    /// Largest `|p0_tilde - p2|` along the sampled boundary points.
    pub max_boundary_gap: f64,
    /// Leader's endpoint, where the follower's price reaches zero.
    pub leader_endpoint: f64,
    pub follower_at_endpoint: f64,
    pub slope_positive: bool,
    pub pass: bool,
}

/// Walks the boundary line, where the follower's constraint binds, and
/// confirms that the leader's profit rises with slope `pi_i (1-gamma) Q0`,
/// so the leader would push the follower's price to zero.
pub fn fs_case2_exclusion_check(m: &Market, leader: MnoId, tol: f64) -> Result<Case2Report, OracleError> {
    let region = check_region(m)?;
    let scenario = Scenario::PartPartFs(leader);
    let follower = leader.other();
    let p = m.params();
    let d = m.derived();
    let endpoint = region.intercept(leader);
    let along = |x: f64| {
        let w = with_coord([0.0; 2], leader, x);
        with_coord(w, follower, omega_bar_follower(m, leader, x))
    };
    let q0 = m.flows_unclamped(scenario, p.p2).q0;
    let expected = d.pi(leader) * (1.0 - p.gamma) * q0;

    let mut samples = Vec::new();
    for k in 1..=5 {
        let x = endpoint * k as f64 / 6.0;
        let w = along(x);
        let derivative = central_difference(|t| pair_profit(m, scenario, leader, along(t)), x);
        let follower_slope = central_difference(|y| pair_profit(m, scenario, follower, with_coord(w, follower, y)), w[follower.index()]);
        samples.push(BoundarySample {
            w_leader: x,
            w_follower: w[follower.index()],
            derivative,
            expected,
            lambda: follower_slope / region.coef[follower.index()],
            lambda_closed_form: lambda_follower(m, leader, x),
        });
    }
    let lambda_scale = p.eps * d.s * p.p2;
    let max_slope_gap = samples
        .iter()
        .map(|s| relative_gap(s.derivative, s.expected, 1e-12 * d.q_total))
        .fold(0.0, f64::max);
    let max_lambda_gap = samples
        .iter()
        .map(|s| relative_gap(s.lambda, s.lambda_closed_form, lambda_scale))
        .fold(0.0, f64::max);
    let max_boundary_gap = samples
        .iter()
        .map(|s| region.slack(along(s.w_leader)).abs())
        .fold(0.0, f64::max);
    let slope_positive = samples.iter().all(|s| s.derivative > 0.0);
    let follower_at_endpoint = omega_bar_follower(m, leader, endpoint);
    let pass = slope_positive
        && max_slope_gap <= tol
        && max_lambda_gap <= tol
        && max_boundary_gap <= 1e-9 * p.p2
        && follower_at_endpoint.abs() <= 1e-9 * endpoint.abs().max(1.0);
    Ok(Case2Report {
        leader,
        samples,
        max_slope_gap,
        max_lambda_gap,
        max_boundary_gap,
        leader_endpoint: endpoint,
        follower_at_endpoint,
        slope_positive,
        pass,
    })
}

/// Both partners constrained in the simultaneous game, parametrised by
/// MNO 1's multiplier.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    /// `eps S (r0_flat - r0)`, the length of the multiplier interval.
    pub interval: f64,
    pub lambdas: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    /// Largest second difference of either payoff, relative to the retail
    /// revenue.
    pub max_curvature: f64,
    /// Largest `|p0_tilde - p2|` over the sampled points.
    pub max_boundary_gap: f64,
    /// Distance of the segment's endpoints to the two boundary optima.
    pub endpoint_gap: f64,
    pub phi1_peaks_at_zero: bool,
    pub phi2_peaks_at_end: bool,
    pub pass: bool,
}

/// Wholesale prices solving each partner's stationarity condition with
/// multipliers `(lambda1, lambda2)`.
pub fn constrained_pair(m: &Market, lambdas: [f64; 2]) -> [f64; 2] {
    let p = m.params();
    let d = m.derived();
    let coord = |i: MnoId| {
        let num = d.h(i) * p.q(i) / p.p(i) + p.c(i) * (1.0 - p.gamma) * d.pi(i) * d.s + 2.0 * d.q_total
            - 2.0 * d.s * p.p2
            - lambdas[i.index()] / p.eps;
        num / ((1.0 - p.gamma) * d.pi(i) * d.s)
    };
    [coord(MnoId::One), coord(MnoId::Two)]
}

/// Samples both partners' payoffs along the constrained segment and confirms
/// they are affine with opposite monotonicity, so no point of the segment is
/// a joint maximiser.
pub fn ps_phi_linearity_check(m: &Market, samples: usize) -> Result<PhiReport, OracleError> {
    let p = m.params();
    let t = solvers::thresholds(m);
    if p.r0 >= t.r_flat_0 - m.tolerance() {
        return Err(OracleError::RequiresPsInfeasible {
            r0: p.r0,
            r0_flat: t.r_flat_0,
        });
    }
    let samples = samples.max(5);
    let interval = multiplier_sum(m);
    let region = Region::of(m);
    let scenario = Scenario::PartPartPs;
    let lambdas: Vec<f64> = (0..samples).map(|k| interval * k as f64 / (samples - 1) as f64).collect();
    let points: Vec<[f64; 2]> = lambdas.iter().map(|&l| constrained_pair(m, [l, interval - l])).collect();
    let payoff = |w: [f64; 2], i| m.mno_profit_unclamped(scenario, i, p.p2, w);
    let phi1: Vec<f64> = points.iter().map(|&w| payoff(w, MnoId::One)).collect();
    let phi2: Vec<f64> = points.iter().map(|&w| payoff(w, MnoId::Two)).collect();

    let revenue = p.p1 * p.q1 + p.p2 * p.q2;
    let curvature = |v: &[f64]| {
        v.windows(3)
            .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs() / revenue)
            .fold(0.0, f64::max)
    };
    let max_curvature = curvature(&phi1).max(curvature(&phi2));
    let max_boundary_gap = points.iter().map(|&w| region.slack(w).abs()).fold(0.0, f64::max);

    let wa = solvers::point_wa(m);
    let wb = solvers::point_wb(m);
    let first = points[0];
    let last = points[samples - 1];
    let scale = p.p2;
    let endpoint_gap = [
        relative_gap(first[0], wa[0], scale),
        relative_gap(first[1], wa[1], scale),
        relative_gap(last[0], wb[0], scale),
        relative_gap(last[1], wb[1], scale),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, &x)| if x > acc.1 { (k, x) } else { acc })
            .0
    };
    let phi1_peaks_at_zero = argmax(&phi1) == 0;
    let phi2_peaks_at_end = argmax(&phi2) == samples - 1;
    let pass = max_curvature <= 1e-7
        && max_boundary_gap <= 1e-9 * p.p2
        && endpoint_gap <= 1e-9
        && phi1_peaks_at_zero
        && phi2_peaks_at_end;
    Ok(PhiReport {
        interval,
        lambdas,
        phi1,
        phi2,
        max_curvature,
        max_boundary_gap,
        endpoint_gap,
        phi1_peaks_at_zero,
        phi2_peaks_at_end,
        pass,
    })
}

/// One line of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Every applicable check for one market.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Options of [`verify_market`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VerifyOptions {
    pub grid: GridSpec,
    /// Relative shift applied to every closed-form wholesale price before it
    /// is checked. Zero in normal use; non-zero values exercise the failure
    /// path.
    pub perturbation: f64,
}

fn perturbed(sol: &PriceSolution, factor: f64) -> PriceSolution {
    let mut out = sol.clone();
    for w in out.wholesale.iter_mut().flatten() {
        *w *= 1.0 + factor;
    }
    out
}

/// Runs brute-force, KKT, curvature and case-analysis checks against the
/// closed forms of every scenario.
pub fn verify_market(m: &Market, options: &VerifyOptions) -> Result<VerificationReport, OracleError> {
    let spec = &options.grid;
    let tol = OracleTolerance::default();
    let kkt_tol = KktTolerance::default();
    let mut checks = Vec::new();
    let mut push = |name: String, pass: bool, detail: String| checks.push(CheckOutcome { name, pass, detail });

    let t = solvers::thresholds(m);
    let d = m.derived();
    let identity = relative_gap(t.r_bar_0 - t.r_flat_0, 2.0 * d.q_total / d.s - 2.0 * m.params().p2, 1.0);
    push(
        "threshold identity".into(),
        identity <= 1e-12,
        format!("r_bar_0 - r_flat_0 vs 2Q/S - 2p2: gap {identity:.3e}"),
    );

    for partner in MnoId::BOTH {
        let closed = perturbed(&solvers::solve_part_nonpart(m, partner), options.perturbation);
        let v = part_nonpart_oracle_against(m, partner, &closed, spec, &tol)?;
        push(v.check.clone(), v.pass, v.to_string());
        let w = closed.wholesale[partner.index()].unwrap_or(0.0);
        let k = kkt_residuals_part_nonpart(m, partner, w, &kkt_tol);
        push(format!("part-nonpart-{partner} KKT"), k.satisfied, k.to_string());
        let p0 = closed.p0.unwrap_or(0.0);
        let k = kkt_residuals_retail(m, Scenario::PartNonPart(partner), closed.w(), p0, &kkt_tol);
        push(format!("part-nonpart-{partner} retail KKT"), k.satisfied, k.to_string());
    }

    for leader in MnoId::BOTH {
        let closed = perturbed(&solvers::solve_part_part_fs(m, leader), options.perturbation);
        let v = bilevel_fs_oracle_against(m, leader, &closed, spec, &tol)?;
        push(v.check.clone(), v.pass, v.to_string());
        let k = kkt_residuals_fs(m, leader, closed.w(), &kkt_tol);
        push(format!("part-part-fs leader {leader} KKT"), k.satisfied, k.to_string());
        let c2 = fs_case2_exclusion_check(m, leader, 1e-5)?;
        push(
            format!("part-part-fs leader {leader} constrained-follower exclusion"),
            c2.pass,
            format!(
                "slope gap {:.3e}, multiplier gap {:.3e}, follower at endpoint {:.3e}",
                c2.max_slope_gap, c2.max_lambda_gap, c2.follower_at_endpoint
            ),
        );
    }

    let closed = perturbed(&solvers::solve_part_part_ps(m), options.perturbation);
    let v = simultaneous_ps_oracle_against(m, &closed, spec, &tol)?;
    push(v.check.clone(), v.pass, v.to_string());
    if closed.feasible {
        let k = kkt_residuals_ps(m, closed.w(), &kkt_tol);
        let identity_ok = k.identity_gap.is_none_or(|g| g <= 1e-6);
        push(
            "part-part-ps KKT".into(),
            k.report.satisfied && identity_ok,
            format!("{}; multiplier identity gap {:?}", k.report, k.identity_gap),
        );
    } else {
        let phi = ps_phi_linearity_check(m, 9)?;
        push(
            "part-part-ps no-solution (affine payoffs on the boundary)".into(),
            phi.pass,
            format!(
                "interval {:.6}, curvature {:.3e}, endpoints {:.3e}",
                phi.interval, phi.max_curvature, phi.endpoint_gap
            ),
        );
        for (name, w) in [("w^A", solvers::point_wa(m)), ("w^B", solvers::point_wb(m))] {
            let k = kkt_residuals_ps(m, w, &kkt_tol);
            let ok = k.identity_gap.is_some_and(|g| g <= 1e-6);
            push(
                format!("part-part-ps multiplier identity at {name}"),
                ok,
                format!("lambda = {:?}, expected sum {:.6}", k.report.multipliers, k.expected_multiplier_sum),
            );
        }
    }

    for c in curvature_checks(m) {
        push(
            format!("curvature {}", c.name),
            c.gap <= 1e-6,
            format!("fd {:.10} expected {:.10} gap {:.3e}", c.finite_difference, c.expected, c.gap),
        );
    }
    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketParams;
    use approx::assert_relative_eq;

    fn market(r0: f64) -> Market {
        Market::new(MarketParams::reference().with_r0(r0)).unwrap()
    }

    fn fast() -> GridSpec {
        GridSpec::new(801, 3)
    }

    #[test]
    fn retail_grid_matches_closed_form() {
        let m = Market::reference();
        let s = Scenario::PartNonPart(MnoId::One);
        let (p0, _) = grid_argmax_p0(&m, s, [20.0, 0.0], &GridSpec::default()).unwrap();
        assert_relative_eq!(p0, solvers::p0_tilde_single(&m, 20.0), max_relative = 1e-4);
        let (p0, _) = grid_argmax_p0(&m, s, [60.0, 0.0], &GridSpec::default()).unwrap();
        assert_eq!(p0, 30.0);
        // elasticity cancels from the first-order condition
        let scaled = Market::new(MarketParams::reference().with_eps(0.9)).unwrap();
        let (q0, _) = grid_argmax_p0(&scaled, s, [20.0, 0.0], &GridSpec::default()).unwrap();
        let (p0, _) = grid_argmax_p0(&m, s, [20.0, 0.0], &GridSpec::default()).unwrap();
        assert_relative_eq!(p0, q0, max_relative = 1e-9);
        assert!(grid_argmax_p0(&m, Scenario::NonPartNonPart, [0.0; 2], &fast()).is_err());
    }

    #[test]
    fn part_nonpart_oracle_reference() {
        for r0 in [10.0, 0.0] {
            let m = market(r0);
            for partner in MnoId::BOTH {
                let v = part_nonpart_oracle(&m, partner, &fast()).unwrap();
                assert!(v.pass, "{v}");
            }
        }
    }

    #[test]
    fn bilevel_oracle_reference_both_branches() {
        let m = Market::reference();
        let v = bilevel_fs_oracle(&m, MnoId::One, &fast()).unwrap();
        assert!(v.pass, "{v}");
        assert_eq!(v.oracle_branch, Branch::Boundary);
        assert_relative_eq!(v.comparison("w_leader").unwrap().oracle, 29.987, max_relative = 1e-3);

        let v = bilevel_fs_oracle(&m, MnoId::Two, &fast()).unwrap();
        assert!(v.pass, "{v}");

        let m = market(50.0);
        let v = bilevel_fs_oracle(&m, MnoId::One, &fast()).unwrap();
        assert!(v.pass, "{v}");
        assert_eq!(v.oracle_branch, Branch::Interior);
    }

    #[test]
    fn bilevel_oracle_flags_wrong_answer() {
        let m = Market::reference();
        let closed = perturbed(&solvers::solve_part_part_fs(&m, MnoId::One), 0.05);
        let v = bilevel_fs_oracle_against(&m, MnoId::One, &closed, &fast(), &OracleTolerance::default()).unwrap();
        assert!(!v.pass);
        assert!(v.max_gap > 1e-3);
    }

    #[test]
    fn ps_oracle_trichotomy_on_reference() {
        let v = simultaneous_ps_oracle(&market(40.0), &fast()).unwrap();
        assert!(v.pass, "{v}");
        assert_eq!(v.oracle_branch, Branch::Interior);

        let v = simultaneous_ps_oracle(&Market::reference(), &fast()).unwrap();
        assert!(v.pass, "{v}");
        assert_eq!(v.oracle_branch, Branch::NoSolution);

        let r_flat = solvers::thresholds(&Market::reference()).r_flat_0;
        let v = simultaneous_ps_oracle(&market(r_flat), &GridSpec::new(2001, 4)).unwrap();
        assert!(v.pass, "{v}");
        assert_eq!(v.oracle_branch, Branch::Boundary);
    }

    #[test]
    fn kkt_fs_at_optimum_and_negative_control() {
        let tol = KktTolerance::default();
        let m = Market::reference();
        let wb = solvers::point_wb(&m);
        let k = kkt_residuals_fs(&m, MnoId::One, wb, &tol);
        assert!(k.satisfied, "{k:?}");
        assert!(k.active);
        // follower sits on its reaction line, so its multiplier vanishes
        assert!(k.multipliers[0].abs() < 1e-6 * 1000.0);
        // the leader would like to go further (w_tilde > w_bar)
        assert!(k.multipliers[1] > 0.0);

        let bad = kkt_residuals_fs(&m, MnoId::One, [wb[0] + 5.0, wb[1]], &tol);
        assert!(!bad.satisfied);

        let m = market(50.0);
        let wt = solvers::interior_leader_point(&m, MnoId::One);
        let k = kkt_residuals_fs(&m, MnoId::One, wt, &tol);
        assert!(k.satisfied && !k.active, "{k:?}");
        assert_eq!(k.multipliers, vec![0.0, 0.0]);
    }

    #[test]
    fn kkt_ps_cases() {
        let tol = KktTolerance::default();
        let m = market(40.0);
        let k = kkt_residuals_ps(&m, solvers::point_wc(&m), &tol);
        assert!(k.report.satisfied && !k.report.active);
        assert_eq!(k.report.multipliers, vec![0.0, 0.0]);

        let m = market(20.0);
        let k = kkt_residuals_ps(&m, solvers::point_wa(&m), &tol);
        assert!(k.report.active);
        let expected = multiplier_sum(&m);
        assert!(expected > 0.0);
        assert!(k.report.multipliers[0].abs() < 1e-6 * expected);
        assert_relative_eq!(k.report.multipliers[1], expected, max_relative = 1e-6);
        assert!(k.identity_gap.unwrap() < 1e-6);

        let r_flat = solvers::thresholds(&Market::reference()).r_flat_0;
        let m = market(r_flat);
        let k = kkt_residuals_ps(&m, solvers::point_wc(&m), &tol);
        assert!(k.report.active);
        let sum = k.report.multipliers[0] + k.report.multipliers[1];
        assert!(sum.abs() < 1e-6 * m.params().eps * m.derived().s * 30.0, "{k:?}");
    }

    #[test]
    fn curvature_constants_on_reference() {
        for c in curvature_checks(&Market::reference()) {
            assert!(c.gap < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn case2_exclusion_both_leaders() {
        let m = Market::reference();
        for leader in MnoId::BOTH {
            let r = fs_case2_exclusion_check(&m, leader, 1e-5).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.samples.len(), 5);
        }
        let r = fs_case2_exclusion_check(&m, MnoId::One, 1e-5).unwrap();
        // pi1 (1-gamma) Q0 with Q0 = 75
        assert_relative_eq!(r.samples[0].expected, 0.6 * 0.6 * 75.0, max_relative = 1e-12);
    }

    #[test]
    fn phi_check_and_precondition() {
        for r0 in [10.0, 27.0] {
            let r = ps_phi_linearity_check(&market(r0), 9).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let short = ps_phi_linearity_check(&market(27.0), 9).unwrap();
        let long = ps_phi_linearity_check(&market(10.0), 9).unwrap();
        assert!(short.interval < long.interval);
        assert!(matches!(
            ps_phi_linearity_check(&market(40.0), 9),
            Err(OracleError::RequiresPsInfeasible { .. })
        ));
        // interval collapses as r0 approaches the threshold from below
        let r_flat = solvers::thresholds(&Market::reference()).r_flat_0;
        let tiny = ps_phi_linearity_check(&market(r_flat - 1e-6), 5).unwrap();
        assert!(tiny.interval < 1e-3);
        assert_relative_eq!(tiny.phi1[0], tiny.phi1[4], max_relative = 1e-8);
    }

    #[test]
    fn verify_reference_passes_and_corruption_fails() {
        let options = VerifyOptions {
            grid: fast(),
            perturbation: 0.0,
        };
        let report = verify_market(&Market::reference(), &options).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
        let bad = verify_market(
            &Market::reference(),
            &VerifyOptions {
                perturbation: 0.02,
                ..options
            },
        )
        .unwrap();
        assert!(!bad.pass());
    }
}
