//! Domain types, canonicalization, derived quantities, and game classification.
//!
//! Conventions, fixed once at construction time:
//!
//! - Instances are stored in *canonical* orientation: total baseline demand in
//!   period 1 never exceeds period 2 (`S_b1 <= S_b2`). If the input violates
//!   this, the two period labels are swapped for every agent and the swap is
//!   recorded in [`Orientation`], so results can be mapped back.
//! - A shift `x_i > 0` moves demand from period 2 into period 1; an agent with
//!   shift `x` consumes `demand_p1 + x` in period 1 and `demand_p2 - x` in
//!   period 2.
//! - Ties in total demand are charged on period 1.

use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::scalar::{lit, Scalar, CLASSIFY_EPS};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// One strategic demand-shifting participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agent<S> {
    pub id: String,
    /// Baseline demand in period 1 (kW).
    pub demand_p1: S,
    /// Baseline demand in period 2 (kW).
    pub demand_p2: S,
    /// Quadratic shifting penalty coefficient (cost per kW^2), strictly positive.
    pub penalty: S,
}

impl<S: Scalar> Agent<S> {
    pub fn new(id: impl Into<String>, demand_p1: S, demand_p2: S, penalty: S) -> Self {
        Agent { id: id.into(), demand_p1, demand_p2, penalty }
    }

    /// Critical point `r = pi / (2 alpha)`: the payoff-optimal shift magnitude
    /// within a fixed charged period, and the agent's economic shifting limit.
    pub fn critical_point(&self, cp_price: S) -> S {
        cp_price / (lit::<S>(2.0) * self.penalty)
    }

    /// Balance point `b_i = (X_{i,2} - X_{i,1}) / 2`: the shift that equalizes
    /// this agent's own demand across the two periods.
    pub fn balance_point(&self) -> S {
        (self.demand_p2 - self.demand_p1) / lit::<S>(2.0)
    }
}

/// Whether period labels were swapped while canonicalizing an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Original,
    Swapped,
}

impl Orientation {
    pub fn is_swapped(self) -> bool {
        matches!(self, Orientation::Swapped)
    }

    /// Maps a shift between input and canonical conventions (its own inverse).
    pub fn map_shift<S: Scalar>(self, x: S) -> S {
        match self {
            Orientation::Original => x,
            Orientation::Swapped => -x,
        }
    }

    /// Maps a period-indexed pair between the two conventions.
    pub fn map_pair<T>(self, pair: (T, T)) -> (T, T) {
        match self {
            Orientation::Original => pair,
            Orientation::Swapped => (pair.1, pair.0),
        }
    }

    /// Maps a period label between the two conventions.
    pub fn map_period(self, period: Period) -> Period {
        match self {
            Orientation::Original => period,
            Orientation::Swapped => period.other(),
        }
    }
}

/// One of the two billing periods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Period {
    One,
    Two,
}

impl Period {
    pub fn other(self) -> Period {
        match self {
            Period::One => Period::Two,
            Period::Two => Period::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Period::One => 1,
            Period::Two => 2,
        }
    }
}

/// A set of agents plus the CP price, stored canonically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameInstance<S> {
    agents: Vec<Agent<S>>,
    cp_price: S,
    orientation: Orientation,
}

/// Per-agent and system-level derived quantities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedPoints<S> {
    /// Critical point `r_i` per agent (always positive).
    pub critical: Vec<S>,
    /// Balance point `b_i` per agent.
    pub balance: Vec<S>,
    /// System balance point `b = (S_b2 - S_b1) / 2`; non-negative canonically.
    pub system_balance: S,
    /// System average demand `S = (S_b2 + S_b1) / 2`.
    pub system_average: S,
}

impl<S: Scalar> DerivedPoints<S> {
    /// Sum of the critical points.
    pub fn critical_sum(&self) -> S {
        self.critical.iter().copied().sum()
    }
}

/// Whether an agent can economically balance its own demand (`-r <= b <= r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentCapability {
    Capable,
    /// Balance point above the critical point (`b > r`).
    UpperNonCapable,
    /// Balance point below the mirrored critical point (`b < -r`).
    LowerNonCapable,
}

impl AgentCapability {
    /// Classifies from a balance/critical pair, boundary-inclusive.
    pub fn classify<S: Scalar>(balance: S, critical: S) -> Self {
        let eps = lit::<S>(CLASSIFY_EPS);
        if balance > critical + eps {
            AgentCapability::UpperNonCapable
        } else if balance < -critical - eps {
            AgentCapability::LowerNonCapable
        } else {
            AgentCapability::Capable
        }
    }

    pub fn is_capable(self) -> bool {
        matches!(self, AgentCapability::Capable)
    }
}

/// The three structural regimes of the shaving game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameType {
    Concave,
    Quasiconcave,
    NonConcave,
}

/// Per-agent demand shifts, ordered like the instance's agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftProfile<S>(pub Vec<S>);

impl<S: Scalar> ShiftProfile<S> {
    pub fn zeros(n: usize) -> Self {
        ShiftProfile(vec![S::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> S {
        self.0.iter().copied().sum()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

// ---------------------------------------------------------------------------
// Construction and canonicalization
// ---------------------------------------------------------------------------

impl<S: Scalar> GameInstance<S> {
    /// Validates the inputs and canonicalizes the period labels.
    pub fn new(agents: Vec<Agent<S>>, cp_price: S) -> Result<Self, ValidationError> {
        if agents.len() < 2 {
            return Err(ValidationError::TooFewAgents(agents.len()));
        }
        if !cp_price.is_finite() || cp_price <= S::zero() {
            return Err(ValidationError::NonPositivePrice);
        }
        let mut seen = std::collections::HashSet::new();
        for a in &agents {
            for (v, field) in [(a.demand_p1, "demand_p1"), (a.demand_p2, "demand_p2"), (a.penalty, "penalty")] {
                if !v.is_finite() {
                    return Err(ValidationError::NonFinite { id: a.id.clone(), field });
                }
            }
            if a.penalty <= S::zero() {
                return Err(ValidationError::NonPositivePenalty { id: a.id.clone() });
            }
            if a.demand_p1 < S::zero() {
                return Err(ValidationError::NegativeDemand { id: a.id.clone(), field: "demand_p1" });
            }
            if a.demand_p2 < S::zero() {
                return Err(ValidationError::NegativeDemand { id: a.id.clone(), field: "demand_p2" });
            }
            if !seen.insert(a.id.clone()) {
                return Err(ValidationError::DuplicateId(a.id.clone()));
            }
        }
        Ok(Self::canonicalize_parts(agents, cp_price))
    }

    fn canonicalize_parts(mut agents: Vec<Agent<S>>, cp_price: S) -> Self {
        let s_b1: S = agents.iter().map(|a| a.demand_p1).sum();
        let s_b2: S = agents.iter().map(|a| a.demand_p2).sum();
        let orientation = if s_b1 > s_b2 {
            for a in &mut agents {
                std::mem::swap(&mut a.demand_p1, &mut a.demand_p2);
            }
            Orientation::Swapped
        } else {
            Orientation::Original
        };
        GameInstance { agents, cp_price, orientation }
    }

    /// Re-canonicalizes; an involution (idempotent on valid instances).
    pub fn canonicalize(self) -> Self {
        let mut canon = Self::canonicalize_parts(self.agents, self.cp_price);
        if self.orientation.is_swapped() {
            // Composing two swaps restores the original labeling.
            canon.orientation = match canon.orientation {
                Orientation::Original => Orientation::Swapped,
                Orientation::Swapped => Orientation::Original,
            };
        }
        canon
    }

    pub fn agents(&self) -> &[Agent<S>] {
        &self.agents
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn cp_price(&self) -> S {
        self.cp_price
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Canonical baseline totals `(S_b1, S_b2)` with `S_b1 <= S_b2`.
    pub fn baseline_demands(&self) -> (S, S) {
        let s_b1 = self.agents.iter().map(|a| a.demand_p1).sum();
        let s_b2 = self.agents.iter().map(|a| a.demand_p2).sum();
        (s_b1, s_b2)
    }

    /// Critical points, balance points, system balance point and average.
    pub fn derive_points(&self) -> DerivedPoints<S> {
        let critical = self.agents.iter().map(|a| a.critical_point(self.cp_price)).collect();
        let balance: Vec<S> = self.agents.iter().map(|a| a.balance_point()).collect();
        let (s_b1, s_b2) = self.baseline_demands();
        let two = lit::<S>(2.0);
        DerivedPoints {
            critical,
            balance,
            system_balance: (s_b2 - s_b1) / two,
            system_average: (s_b2 + s_b1) / two,
        }
    }

    /// Capability of each agent under this instance's CP price.
    pub fn classify_agents(&self) -> Vec<AgentCapability> {
        let points = self.derive_points();
        points
            .balance
            .iter()
            .zip(&points.critical)
            .map(|(&b, &r)| AgentCapability::classify(b, r))
            .collect()
    }

    /// Game-type classification; total over valid instances.
    pub fn classify(&self) -> GameType {
        classify_game(&self.derive_points())
    }

    /// Post-shift system demand `(S_1, S_2)`.
    pub fn system_demand(&self, shifts: &ShiftProfile<S>) -> (S, S) {
        let (s_b1, s_b2) = self.baseline_demands();
        let total = shifts.sum();
        (s_b1 + total, s_b2 - total)
    }

    /// Indices of agents whose post-shift demand goes negative in either
    /// period. Reported as a warning rather than rejected: transient solver
    /// iterates may leave the feasible region, and the stability-set check is
    /// the authoritative guard.
    pub fn negative_demand_agents(&self, shifts: &ShiftProfile<S>) -> Vec<usize> {
        self.agents
            .iter()
            .zip(shifts.as_slice())
            .enumerate()
            .filter(|(_, (a, &x))| a.demand_p1 + x < S::zero() || a.demand_p2 - x < S::zero())
            .map(|(i, _)| i)
            .collect()
    }

    /// Rejects shift profiles whose length does not match the agent count.
    pub fn check_shifts(&self, shifts: &ShiftProfile<S>) -> Result<(), ValidationError> {
        if shifts.len() != self.agents.len() {
            Err(ValidationError::ShiftLengthMismatch { got: shifts.len(), want: self.agents.len() })
        } else {
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Classification and payoffs
// ---------------------------------------------------------------------------

/// Game type from derived points: concave when the system imbalance exceeds
/// the pooled shifting limits (`b > sum r_i`), quasiconcave when every agent
/// is capable, non-concave otherwise. The `b = sum r_i` boundary falls through
/// to the non-strict rules below.
pub fn classify_game<S: Scalar>(points: &DerivedPoints<S>) -> GameType {
    let eps = lit::<S>(CLASSIFY_EPS);
    let all_capable = points
        .balance
        .iter()
        .zip(&points.critical)
        .all(|(&b, &r)| AgentCapability::classify(b, r).is_capable());
    if all_capable {
        GameType::Quasiconcave
    } else if points.system_balance > points.critical_sum() + eps {
        GameType::Concave
    } else {
        GameType::NonConcave
    }
}

/// CP indicator: `true` when period 1 carries the charge (`s1 >= s2`, ties to
/// period 1).
pub fn indicator<S: Scalar>(s1: S, s2: S) -> bool {
    s1 >= s2
}

/// The charged period for a post-shift demand pair.
pub fn cp_period<S: Scalar>(s1: S, s2: S) -> Period {
    if indicator(s1, s2) {
        Period::One
    } else {
        Period::Two
    }
}

/// Payoff of one agent at a shift, given the realized system demands:
/// the negative of its CP charge plus shifting penalty.
pub fn agent_payoff<S: Scalar>(agent: &Agent<S>, shift: S, s1: S, s2: S, cp_price: S) -> S {
    let (f1, f2) = period_payoffs(agent, shift, cp_price);
    if indicator(s1, s2) {
        f1
    } else {
        f2
    }
}

/// Period-wise payoffs `(f_{i,1}, f_{i,2})`: what the agent earns if the
/// charge falls on period 1 resp. period 2.
pub fn period_payoffs<S: Scalar>(agent: &Agent<S>, shift: S, cp_price: S) -> (S, S) {
    let pen = agent.penalty * shift * shift;
    let f1 = -cp_price * (agent.demand_p1 + shift) - pen;
    let f2 = -cp_price * (agent.demand_p2 - shift) - pen;
    (f1, f2)
}

/// Per-agent cost (positive CP charge plus penalty) at a full profile.
pub fn agent_costs<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> Vec<S> {
    let (s1, s2) = instance.system_demand(shifts);
    instance
        .agents()
        .iter()
        .zip(shifts.as_slice())
        .map(|(a, &x)| -agent_payoff(a, x, s1, s2, instance.cp_price()))
        .collect()
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn agent(id: &str, d1: f64, d2: f64, alpha: f64) -> Agent<f64> {
        Agent::new(id, d1, d2, alpha)
    }

    /// The two-agent instance used across the case studies:
    /// X = (3, 10), Y = (6, 3), pi = 1, with penalties supplied per case.
    fn two_agent(alpha_x: f64, alpha_y: f64) -> GameInstance<f64> {
        GameInstance::new(
            vec![agent("x", 3.0, 10.0, alpha_x), agent("y", 6.0, 3.0, alpha_y)],
            1.0,
        )
        .unwrap()
    }

    fn table1() -> GameInstance<f64> {
        GameInstance::new(
            vec![
                agent("1", 7.0, 3.0, 0.2),
                agent("2", 3.0, 13.0, 0.1),
                agent("3", 10.0, 4.0, 0.4),
                agent("4", 1.0, 4.0, 0.5),
                agent("5", 2.0, 6.0, 0.2),
                agent("6", 5.0, 3.0, 0.1),
            ],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn canonicalize_keeps_already_ordered_instance() {
        let g = two_agent(0.1, 0.2);
        assert_eq!(g.orientation(), Orientation::Original);
        assert_eq!(g.baseline_demands(), (9.0, 13.0));
    }

    #[test]
    fn canonicalize_swaps_periods_when_needed() {
        let g = GameInstance::new(
            vec![agent("x", 10.0, 3.0, 0.1), agent("y", 3.0, 6.0, 0.2)],
            1.0,
        )
        .unwrap();
        assert_eq!(g.orientation(), Orientation::Swapped);
        assert_eq!(g.agents()[0].demand_p1, 3.0);
        assert_eq!(g.agents()[0].demand_p2, 10.0);
        assert_eq!(g.agents()[1].demand_p1, 6.0);
        assert_eq!(g.agents()[1].demand_p2, 3.0);
        assert_eq!(g.baseline_demands(), (9.0, 13.0));
    }

    #[test]
    fn canonicalize_leaves_balanced_instance_alone() {
        let g = GameInstance::new(
            vec![agent("a", 5.0, 5.0, 0.3), agent("b", 5.0, 5.0, 0.3)],
            1.0,
        )
        .unwrap();
        assert_eq!(g.orientation(), Orientation::Original);
        assert_eq!(g.derive_points().system_balance, 0.0);
    }

    #[test]
    fn canonicalize_is_an_involution() {
        let g = GameInstance::new(
            vec![agent("x", 10.0, 3.0, 0.1), agent("y", 3.0, 6.0, 0.2)],
            1.0,
        )
        .unwrap();
        let again = g.clone().canonicalize();
        assert_eq!(g.agents(), again.agents());
        assert_eq!(g.baseline_demands(), again.baseline_demands());
    }

    #[test]
    fn validation_rejects_bad_instances() {
        assert!(matches!(
            GameInstance::new(vec![agent("x", 1.0, 2.0, 0.1)], 1.0),
            Err(ValidationError::TooFewAgents(1))
        ));
        assert!(matches!(
            GameInstance::new(vec![agent("x", 1.0, 2.0, 0.1), agent("y", 1.0, 2.0, 0.0)], 1.0),
            Err(ValidationError::NonPositivePenalty { .. })
        ));
        assert!(matches!(
            GameInstance::new(vec![agent("x", 1.0, 2.0, 0.1), agent("y", 1.0, 2.0, 0.1)], 0.0),
            Err(ValidationError::NonPositivePrice)
        ));
        assert!(matches!(
            GameInstance::new(vec![agent("x", -1.0, 2.0, 0.1), agent("y", 1.0, 2.0, 0.1)], 1.0),
            Err(ValidationError::NegativeDemand { .. })
        ));
    }

    #[test]
    fn derived_points_match_known_values() {
        let g = two_agent(0.1, 0.2);
        let p = g.derive_points();
        assert_eq!(p.critical, vec![5.0, 2.5]);
        assert_eq!(p.balance, vec![3.5, -1.5]);
        assert_eq!(p.system_balance, 2.0);
        assert_eq!(p.system_average, 11.0);

        let t = table1().derive_points();
        assert_eq!(t.system_balance, 2.5);
        assert_eq!(t.system_average, 30.5);
    }

    #[test]
    fn balance_points_sum_to_system_balance() {
        // Relative tolerance 1e-12 across a spread of instances.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let n = 2 + (next() * 8.0) as usize;
            let agents: Vec<_> = (0..n)
                .map(|i| agent(&format!("a{i}"), next() * 20.0, next() * 20.0, 0.01 + next()))
                .collect();
            let g = GameInstance::new(agents, 0.5 + next()).unwrap();
            let p = g.derive_points();
            let sum: f64 = p.balance.iter().sum();
            let scale = p.system_balance.abs().max(1.0);
            assert!((sum - p.system_balance).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn capability_matches_case_studies() {
        // Case (1): both capable.
        let g = two_agent(0.1, 0.2);
        assert_eq!(g.classify_agents(), vec![AgentCapability::Capable, AgentCapability::Capable]);
        // Case (2): y lower non-capable (b = -1.5 < -r = -1).
        let g = two_agent(0.1, 0.5);
        assert_eq!(
            g.classify_agents(),
            vec![AgentCapability::Capable, AgentCapability::LowerNonCapable]
        );
        // Zero-demand agent balances trivially.
        assert_eq!(AgentCapability::classify(0.0, 7.0), AgentCapability::Capable);
        // Boundary b = r stays capable.
        assert_eq!(AgentCapability::classify(5.0, 5.0), AgentCapability::Capable);
    }

    #[test]
    fn table1_flags_agents_3_and_4() {
        let caps = table1().classify_agents();
        assert_eq!(caps[2], AgentCapability::LowerNonCapable);
        assert_eq!(caps[3], AgentCapability::UpperNonCapable);
        for i in [0usize, 1, 4, 5] {
            assert!(caps[i].is_capable());
        }
    }

    #[test]
    fn classification_matches_case_studies() {
        assert_eq!(two_agent(0.1, 0.2).classify(), GameType::Quasiconcave);
        assert_eq!(two_agent(0.1, 0.5).classify(), GameType::NonConcave);
        // Case (3): r_x + r_y = 1/1.2 + 1 < b = 2.
        assert_eq!(two_agent(0.6, 0.5).classify(), GameType::Concave);
        assert_eq!(table1().classify(), GameType::NonConcave);
    }

    #[test]
    fn classification_partitions_parameter_space() {
        // Independent re-statement of the three condition sets; each sampled
        // instance must satisfy exactly the one it was classified into.
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let n = 2 + (next() * 5.0) as usize;
            let agents: Vec<_> = (0..n)
                .map(|i| agent(&format!("a{i}"), next() * 15.0, next() * 15.0, 0.02 + 0.5 * next()))
                .collect();
            let g = GameInstance::new(agents, 1.0).unwrap();
            let p = g.derive_points();
            let r_sum: f64 = p.critical.iter().sum();
            let b = p.system_balance;
            let concave = b > r_sum;
            let quasi = p
                .balance
                .iter()
                .zip(&p.critical)
                .all(|(&bi, &ri)| -ri <= bi && bi <= ri);
            let non_concave = !concave && !quasi;
            // Skip draws within tolerance of a boundary.
            let near_boundary = (b - r_sum).abs() < 1e-7
                || p.balance.iter().zip(&p.critical).any(|(&bi, &ri)| (bi.abs() - ri).abs() < 1e-7);
            if near_boundary {
                continue;
            }
            let expected = if concave {
                GameType::Concave
            } else if quasi {
                GameType::Quasiconcave
            } else {
                assert!(non_concave);
                GameType::NonConcave
            };
            assert_eq!(g.classify(), expected);
        }
    }

    #[test]
    fn system_demand_and_flags() {
        let g = two_agent(0.1, 0.2);
        assert_eq!(g.system_demand(&ShiftProfile::zeros(2)), (9.0, 13.0));
        let ne = ShiftProfile(vec![3.5, -1.5]);
        assert_eq!(g.system_demand(&ne), (11.0, 11.0));

        let t = table1();
        let shifts = ShiftProfile(vec![-2.0, 3.85, -1.25, 0.93, 1.97, -1.0]);
        let (s1, s2) = t.system_demand(&shifts);
        assert!((s1 - 30.5).abs() < 1e-12 && (s2 - 30.5).abs() < 1e-12);

        // Shift large enough to drive agent y's period-2 demand negative.
        let bad = ShiftProfile(vec![0.0, 4.0]);
        assert_eq!(g.negative_demand_agents(&bad), vec![1]);
        assert!(g.negative_demand_agents(&ne).is_empty());
    }

    #[test]
    fn indicator_ties_to_period_one() {
        assert!(indicator(11.0, 11.0));
        assert!(!indicator(9.0, 13.0));
        assert!(indicator(13.0, 9.0));
        assert_eq!(cp_period(5.0, 5.0), Period::One);
    }

    #[test]
    fn payoff_matches_hand_computations() {
        let a = agent("x", 3.0, 10.0, 0.1);
        // No shift, charge on period 2: f = -pi * X2.
        assert_eq!(agent_payoff(&a, 0.0, 9.0, 13.0, 1.0), -10.0);
        // Case (1) NE, agent x: tie charges period 1.
        let f = agent_payoff(&a, 3.5, 11.0, 11.0, 1.0);
        assert!((f - (-7.725)).abs() < 1e-12);
        // Zero demand, zero shift: payoff vanishes.
        let z = agent("z", 0.0, 0.0, 0.7);
        assert_eq!(agent_payoff(&z, 0.0, 1.0, 2.0, 1.0), 0.0);
    }

    #[test]
    fn zero_shift_payoff_is_cp_charge_only() {
        let a = agent("x", 4.0, 9.0, 0.3);
        let (f1, f2) = period_payoffs(&a, 0.0, 2.0);
        assert_eq!(f1, -8.0);
        assert_eq!(f2, -18.0);
    }

    #[test]
    fn shift_length_mismatch_is_rejected() {
        let g = two_agent(0.1, 0.2);
        assert!(g.check_shifts(&ShiftProfile::zeros(3)).is_err());
        assert!(g.check_shifts(&ShiftProfile::zeros(2)).is_ok());
    }

    #[test]
    fn works_at_f32() {
        let g = GameInstance::new(
            vec![
                Agent::new("x", 3.0f32, 10.0, 0.1),
                Agent::new("y", 6.0f32, 3.0, 0.2),
            ],
            1.0f32,
        )
        .unwrap();
        assert_eq!(g.classify(), GameType::Quasiconcave);
        let p = g.derive_points();
        assert!((p.system_balance - 2.0f32).abs() < 1e-6);
    }
}
