//! The 2×2 partnership game between the two MNOs.
//!
//! Each MNO chooses whether to host the MVNO. Payoffs come from the pricing
//! solvers: the sequential model when both partner, the single-partner model
//! when one does, and the no-entry profits otherwise.

use std::fmt;

use crate::market::{Market, MnoId, Scenario};
use crate::solvers::{self, PriceSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Part,
    NonPart,
}

impl Strategy {
    pub const BOTH: [Strategy; 2] = [Strategy::Part, Strategy::NonPart];

    fn index(self) -> usize {
        match self {
            Strategy::Part => 0,
            Strategy::NonPart => 1,
        }
    }

    pub fn flip(self) -> Strategy {
        match self {
            Strategy::Part => Strategy::NonPart,
            Strategy::NonPart => Strategy::Part,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Part => "Part",
            Strategy::NonPart => "NonPart",
        })
    }
}

/// Strategies of MNO 1 and MNO 2, in that order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Strategy, pub Strategy);

impl Profile {
    pub const ALL: [Profile; 4] = [
        Profile(Strategy::Part, Strategy::Part),
        Profile(Strategy::Part, Strategy::NonPart),
        Profile(Strategy::NonPart, Strategy::Part),
        Profile(Strategy::NonPart, Strategy::NonPart),
    ];

    pub fn of(&self, mno: MnoId) -> Strategy {
        match mno {
            MnoId::One => self.0,
            MnoId::Two => self.1,
        }
    }

    /// The profile after `mno` switches strategy.
    pub fn deviate(&self, mno: MnoId) -> Profile {
        match mno {
            MnoId::One => Profile(self.0.flip(), self.1),
            MnoId::Two => Profile(self.0, self.1.flip()),
        }
    }

    /// Scenario solved to fill this cell.
    pub fn scenario(&self, leader: MnoId) -> Scenario {
        match (self.0, self.1) {
            (Strategy::Part, Strategy::Part) => Scenario::PartPartFs(leader),
            (Strategy::Part, Strategy::NonPart) => Scenario::PartNonPart(MnoId::One),
            (Strategy::NonPart, Strategy::Part) => Scenario::PartNonPart(MnoId::Two),
            (Strategy::NonPart, Strategy::NonPart) => Scenario::NonPartNonPart,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Profits of MNO 1 and MNO 2.
    pub payoffs: [f64; 2],
    /// Scenario that produced the payoffs; `None` for hand-built matrices.
    pub source: Option<Scenario>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    /// Indexed by MNO 1's strategy, then MNO 2's.
    pub cells: [[Cell; 2]; 2],
}

impl PayoffMatrix {
    /// Matrix from raw payoffs, `payoffs[s1][s2] = [R1, R2]` with `Part`
    /// first.
    pub fn from_payoffs(payoffs: [[[f64; 2]; 2]; 2]) -> Self {
        let cell = |p: [f64; 2]| Cell { payoffs: p, source: None };
        PayoffMatrix {
            cells: [
                [cell(payoffs[0][0]), cell(payoffs[0][1])],
                [cell(payoffs[1][0]), cell(payoffs[1][1])],
            ],
        }
    }

    pub fn cell(&self, profile: Profile) -> &Cell {
        &self.cells[profile.0.index()][profile.1.index()]
    }

    pub fn payoff(&self, profile: Profile, mno: MnoId) -> f64 {
        self.cell(profile).payoffs[mno.index()]
    }

    /// Largest absolute payoff of `mno`, at least 1.
    pub fn scale(&self, mno: MnoId) -> f64 {
        Profile::ALL
            .iter()
            .map(|&p| self.payoff(p, mno).abs())
            .fold(1.0, f64::max)
    }

    /// Adds `shift` to every payoff of `mno`.
    pub fn shifted(&self, mno: MnoId, shift: f64) -> Self {
        let mut out = self.clone();
        for row in out.cells.iter_mut() {
            for cell in row.iter_mut() {
                cell.payoffs[mno.index()] += shift;
            }
        }
        out
    }
}

/// MNO with the larger customer base; MNO 1 on ties.
pub fn default_leader(m: &Market) -> MnoId {
    let d = m.derived();
    if d.pi1 >= d.pi2 {
        MnoId::One
    } else {
        MnoId::Two
    }
}

fn cell_from(sol: &PriceSolution) -> Cell {
    Cell {
        payoffs: [
            sol.profit_mno1.expect("every game scenario yields profits"),
            sol.profit_mno2.expect("every game scenario yields profits"),
        ],
        source: Some(sol.scenario),
    }
}

/// Builds the game with the sequential model, led by `fs_leader`, in the
/// (Part, Part) cell.
pub fn build_payoff_matrix(m: &Market, fs_leader: MnoId) -> PayoffMatrix {
    let cell = |p: Profile| cell_from(&solvers::solve(m, p.scenario(fs_leader)));
    PayoffMatrix {
        cells: [
            [cell(Profile::ALL[0]), cell(Profile::ALL[1])],
            [cell(Profile::ALL[2]), cell(Profile::ALL[3])],
        ],
    }
}

/// Pure equilibria of a matrix together with every deviation margin.
#[derive(Debug, Clone, PartialEq)]
pub struct NashReport {
    pub equilibria: Vec<Profile>,
    /// `margins[s1][s2][i]`: payoff of MNO `i` at the profile minus its
    /// payoff after switching strategy.
    pub margins: [[[f64; 2]; 2]; 2],
    /// Per-MNO slack on the margins.
    pub tolerance: [f64; 2],
}

impl NashReport {
    pub fn margins_at(&self, profile: Profile) -> [f64; 2] {
        self.margins[profile.0.index()][profile.1.index()]
    }

    pub fn is_equilibrium(&self, profile: Profile) -> bool {
        self.equilibria.contains(&profile)
    }

    pub fn is_unique(&self, profile: Profile) -> bool {
        self.equilibria == [profile]
    }
}

/// Enumerates pure equilibria. Zero margins count as equilibria; each MNO's
/// tolerance is `1e-9` times its largest absolute payoff.
pub fn find_pure_nash(matrix: &PayoffMatrix) -> NashReport {
    let tolerance = MnoId::BOTH.map(|i| 1e-9 * matrix.scale(i));
    let mut margins = [[[0.0; 2]; 2]; 2];
    let mut equilibria = Vec::new();
    for profile in Profile::ALL {
        let m = MnoId::BOTH.map(|i| matrix.payoff(profile, i) - matrix.payoff(profile.deviate(i), i));
        margins[profile.0.index()][profile.1.index()] = m;
        if m[0] >= -tolerance[0] && m[1] >= -tolerance[1] {
            equilibria.push(profile);
        }
    }
    NashReport {
        equilibria,
        margins,
        tolerance,
    }
}

/// Defections from one MNO with and without its partnership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectionCheck {
    pub mno: MnoId,
    /// Defection under (Part, Part) with the sequential model.
    pub d_part: f64,
    /// Defection when `mno` stays out and its rival partners alone.
    pub d_nonpart: f64,
    /// Whether `r0 <= r_bar_0`.
    pub hypothesis: bool,
    pub holds: bool,
}

/// Compares `mno`'s lost customers when it partners to when it stays out.
pub fn check_defection(m: &Market, fs_leader: MnoId, mno: MnoId) -> DefectionCheck {
    let both = solvers::solve_part_part_fs(m, fs_leader);
    let alone = solvers::solve_part_nonpart(m, mno.other());
    let defection = |sol: &PriceSolution| sol.flows.expect("partner scenarios yield flows").defection(mno);
    let d_part = defection(&both);
    let d_nonpart = defection(&alone);
    let tol = 1e-9 * m.derived().q_total;
    DefectionCheck {
        mno,
        d_part,
        d_nonpart,
        hypothesis: m.params().r0 <= solvers::thresholds(m).r_bar_0 + m.tolerance(),
        holds: d_nonpart >= d_part - tol,
    }
}

/// Equilibria of the partnership game together with the hypotheses under
/// which (Part, Part) is known to be an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub leader: MnoId,
    pub matrix: PayoffMatrix,
    pub nash: NashReport,
    pub r0_le_r_bar_0: bool,
    pub r0_le_r_bar_20: bool,
    /// Sequential wholesale prices at or above network costs.
    pub wholesale_above_cost: bool,
    /// MNO 2's single-partner wholesale price at or above its network cost.
    pub single_wholesale2_above_cost: bool,
    pub defection: [DefectionCheck; 2],
    /// `r0 <= r_bar_0` and wholesale prices above cost.
    pub hypothesis_a: bool,
    /// Additionally `r0 <= r_bar_20` and MNO 2's single-partner price above
    /// cost.
    pub hypothesis_b: bool,
    /// (Part, Part) is an equilibrium, or hypothesis (a) fails.
    pub claim_a_holds: bool,
    /// (Part, Part) is the only equilibrium, or hypothesis (b) fails.
    pub claim_b_holds: bool,
}

impl EquilibriumReport {
    pub fn consistent(&self) -> bool {
        self.claim_a_holds && self.claim_b_holds
    }

    /// One-line verdict on the (Part, Part) profile.
    pub fn summary(&self) -> String {
        let pp = Profile(Strategy::Part, Strategy::Part);
        if self.nash.is_equilibrium(pp) && !self.r0_le_r_bar_20 {
            "(Part, Part) is a NE; uniqueness not guaranteed (r0 > r_bar_20)".into()
        } else if self.nash.is_unique(pp) {
            "unique NE: (Part, Part)".into()
        } else if self.nash.is_equilibrium(pp) {
            "(Part, Part) is a NE; other equilibria exist".into()
        } else if self.nash.equilibria.is_empty() {
            "no pure NE".into()
        } else {
            let list: Vec<String> = self.nash.equilibria.iter().map(Profile::to_string).collect();
            format!("NE: {}", list.join(", "))
        }
    }
}

/// Builds and solves the game, then evaluates the partnership hypotheses.
/// Claims are only asserted where their hypotheses hold.
pub fn check_partnership(m: &Market, fs_leader: MnoId) -> EquilibriumReport {
    let t = solvers::thresholds(m);
    let p = m.params();
    let tol = m.tolerance();
    let matrix = build_payoff_matrix(m, fs_leader);
    let nash = find_pure_nash(&matrix);

    let fs = solvers::solve_part_part_fs(m, fs_leader);
    let w = fs.w();
    let wholesale_above_cost = MnoId::BOTH.iter().all(|&i| w[i.index()] >= p.c(i) - tol);
    let single2 = solvers::solve_part_nonpart(m, MnoId::Two).w()[1];
    let single_wholesale2_above_cost = single2 >= p.c2 - tol;
    let r0_le_r_bar_0 = p.r0 <= t.r_bar_0 + tol;
    let r0_le_r_bar_20 = p.r0 <= t.r_bar_20 + tol;

    let hypothesis_a = r0_le_r_bar_0 && wholesale_above_cost;
    let hypothesis_b = hypothesis_a && r0_le_r_bar_20 && single_wholesale2_above_cost;
    let pp = Profile(Strategy::Part, Strategy::Part);
    EquilibriumReport {
        leader: fs_leader,
        defection: MnoId::BOTH.map(|i| check_defection(m, fs_leader, i)),
        claim_a_holds: !hypothesis_a || nash.is_equilibrium(pp),
        claim_b_holds: !hypothesis_b || nash.is_unique(pp),
        matrix,
        nash,
        r0_le_r_bar_0,
        r0_le_r_bar_20,
        wholesale_above_cost,
        single_wholesale2_above_cost,
        hypothesis_a,
        hypothesis_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketParams;
    use approx::assert_relative_eq;

    const PP: Profile = Profile(Strategy::Part, Strategy::Part);
    const NN: Profile = Profile(Strategy::NonPart, Strategy::NonPart);

    fn market(r0: f64) -> Market {
        Market::new(MarketParams::reference().with_r0(r0)).unwrap()
    }

    #[test]
    fn reference_matrix_cells() {
        let m = Market::reference();
        let g = build_payoff_matrix(&m, MnoId::One);
        assert_eq!(g.cell(NN).payoffs, [16800.0, 8400.0]);
        assert_eq!(g.cell(NN).source, Some(Scenario::NonPartNonPart));
        assert_eq!(g.cell(PP).source, Some(Scenario::PartPartFs(MnoId::One)));

        // (Part, Part) recomputed from the raw profit functions at (w^B, p2)
        let wb = solvers::point_wb(&m);
        let s = Scenario::PartPartFs(MnoId::One);
        for i in MnoId::BOTH {
            let direct = m.mno_profit(s, i, 30.0, wb).unwrap();
            assert_relative_eq!(g.payoff(PP, i), direct, max_relative = 1e-12);
        }

        // both profits of a mixed cell come from the same prices
        let sol = solvers::solve_part_nonpart(&m, MnoId::One);
        let cell = g.cell(Profile(Strategy::Part, Strategy::NonPart));
        let s = Scenario::PartNonPart(MnoId::One);
        let p0 = sol.p0.unwrap();
        assert_eq!(cell.payoffs[0], m.mno_profit(s, MnoId::One, p0, sol.w()).unwrap());
        assert_eq!(cell.payoffs[1], m.mno_profit(s, MnoId::Two, p0, sol.w()).unwrap());
    }

    #[test]
    fn dominant_strategy_and_coordination_games() {
        let dominant = PayoffMatrix::from_payoffs([[[3.0, 3.0], [5.0, 1.0]], [[1.0, 5.0], [0.0, 0.0]]]);
        let r = find_pure_nash(&dominant);
        assert_eq!(r.equilibria, vec![PP]);

        let coordination = PayoffMatrix::from_payoffs([[[2.0, 2.0], [0.0, 0.0]], [[0.0, 0.0], [2.0, 2.0]]]);
        let r = find_pure_nash(&coordination);
        assert_eq!(r.equilibria, vec![PP, NN]);
        assert_eq!(r.margins_at(PP), [2.0, 2.0]);

        // ties count
        let flat = PayoffMatrix::from_payoffs([[[1.0; 2]; 2]; 2]);
        assert_eq!(find_pure_nash(&flat).equilibria.len(), 4);
    }

    #[test]
    fn shifting_one_players_payoffs_keeps_equilibria() {
        let g = build_payoff_matrix(&market(5.0), MnoId::One);
        let a = find_pure_nash(&g);
        let b = find_pure_nash(&g.shifted(MnoId::Two, 1234.5));
        assert_eq!(a.equilibria, b.equilibria);
        for p in Profile::ALL {
            assert_relative_eq!(a.margins_at(p)[1], b.margins_at(p)[1], max_relative = 1e-9);
        }
    }

    #[test]
    fn unique_equilibrium_at_low_indirect_revenue() {
        // same margin as the reference market, cheaper network for MNO 1
        let params = MarketParams {
            c1: 2.0,
            ct1: 10.0,
            r0: 1.0,
            ..MarketParams::reference()
        };
        let r = check_partnership(&Market::new(params).unwrap(), MnoId::One);
        assert!(r.hypothesis_a && r.hypothesis_b, "{r:?}");
        assert!(r.nash.is_unique(PP));
        assert!(r.consistent());
        assert_eq!(r.summary(), "unique NE: (Part, Part)");
        assert_eq!(r.defection[1].d_part, 0.0);
    }

    #[test]
    fn reference_market_at_low_indirect_revenue_misses_cost_hypothesis() {
        let r = check_partnership(&market(1.0), MnoId::One);
        let w = solvers::solve_part_part_fs(&market(1.0), MnoId::One).w();
        assert!(w[0] < 8.0);
        assert!(r.r0_le_r_bar_0 && r.r0_le_r_bar_20 && !r.wholesale_above_cost);
        assert!(!r.hypothesis_a);
        assert_eq!(r.nash.equilibria, vec![Profile(Strategy::NonPart, Strategy::Part)]);
        assert_eq!(r.summary(), "NE: (NonPart, Part)");
    }

    #[test]
    fn equilibrium_without_uniqueness_claim() {
        let r = check_partnership(&Market::reference(), MnoId::One);
        assert!(r.hypothesis_a && !r.hypothesis_b);
        assert!(r.nash.is_equilibrium(PP));
        assert!(r.consistent());
        assert_eq!(r.summary(), "(Part, Part) is a NE; uniqueness not guaranteed (r0 > r_bar_20)");
        assert!(r.defection.iter().all(|l| l.holds && l.hypothesis));
    }

    #[test]
    fn hypothesis_gate_with_costly_network() {
        // raise c1 until the leader's wholesale price falls below it
        let params = MarketParams {
            c1: 35.0,
            ct1: 1.0,
            ..MarketParams::reference()
        };
        let m = Market::new(params).unwrap();
        let r = check_partnership(&m, MnoId::One);
        assert!(!r.wholesale_above_cost);
        assert!(!r.hypothesis_a && !r.hypothesis_b);
        assert!(r.claim_a_holds && r.claim_b_holds);
    }

    #[test]
    fn defection_reference_values() {
        let m = Market::reference();
        let l = check_defection(&m, MnoId::One, MnoId::One);
        assert_relative_eq!(l.d_part, 75.0, max_relative = 1e-12);
        assert!(l.d_nonpart > 75.0 && l.holds);

        // partner 2 prices at p2 when r0 <= r_bar_20, so MNO 1 loses the same
        let m = market(1.0);
        let l = check_defection(&m, MnoId::One, MnoId::One);
        assert_relative_eq!(l.d_part, l.d_nonpart, max_relative = 1e-12);
    }

    #[test]
    fn default_leader_has_larger_share() {
        assert_eq!(default_leader(&Market::reference()), MnoId::One);
        let m = Market::new(MarketParams {
            q2: 700.0,
            ..MarketParams::reference()
        })
        .unwrap();
        assert_eq!(default_leader(&m), MnoId::Two);
    }

    #[test]
    fn symmetric_market_gives_symmetric_matrix() {
        let m = Market::new(MarketParams {
            q1: 500.0,
            q2: 500.0,
            p1: 30.0,
            c1: 6.0,
            ct1: 3.0,
            ..MarketParams::reference()
        })
        .unwrap();
        // with a symmetric market the two mixed cells mirror each other
        let g = build_payoff_matrix(&m, MnoId::One);
        let a = g.cell(Profile(Strategy::Part, Strategy::NonPart)).payoffs;
        let b = g.cell(Profile(Strategy::NonPart, Strategy::Part)).payoffs;
        assert_relative_eq!(a[0], b[1], max_relative = 1e-12);
        assert_relative_eq!(a[1], b[0], max_relative = 1e-12);
    }
}
