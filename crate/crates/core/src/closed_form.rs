//! Analytic Nash equilibria and an independent best-response verification
//! oracle.
//!
//! Two-agent instances resolve through the full case table (critical points
//! for the concave game, balance points for the quasiconcave game, and the
//! pinned/covering split for the non-concave game). Multi-agent instances
//! reuse the same structure, except that the non-concave case yields a hybrid
//! equilibrium: one side of the CP/non-CP partition is pinned per agent while
//! the other side is determined only in aggregate. A deterministic
//! representative allocation of the aggregate is produced by water-filling on
//! equal marginal shifting cost.

use serde::Serialize;

use crate::error::NeError;
use crate::game::{
    agent_costs, cp_period, period_payoffs, DerivedPoints, GameInstance, GameType, Orientation,
    Period, ShiftProfile,
};
use crate::scalar::{lit, Scalar, CLASSIFY_EPS};

// ---------------------------------------------------------------------------
// Result types
// ---------------------------------------------------------------------------

/// Shift component of an equilibrium: either a unique per-agent profile or a
/// hybrid (set-level) solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NeShifts<S> {
    Unique { shifts: ShiftProfile<S> },
    Hybrid(HybridShifts<S>),
}

/// Hybrid equilibrium of the non-concave multi-agent game: the determined set
/// is pinned agent by agent; the members of `aggregate_set` are constrained
/// only through their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridShifts<S> {
    /// Pinned agents: `(index, id, shift)`.
    pub determined: Vec<(usize, String, S)>,
    /// Indices of the agents determined only in aggregate.
    pub aggregate_set: Vec<usize>,
    /// Required sum of the aggregate set's shifts.
    pub aggregate_target: S,
    /// One admissible full profile: pinned values plus the minimum-penalty
    /// allocation of the aggregate (equal marginal cost, clamped).
    pub representative: ShiftProfile<S>,
    /// Whether the aggregate is reachable with every member inside its
    /// balance-clamped interval. When false, balancing the system forces some
    /// member past its own balance point, the equilibrium is of the
    /// boundary-payoff kind, and gradient dynamics may settle on a different
    /// admissible allocation than the pinned one.
    pub strict: bool,
}

/// Equilibrium of a shaving game, in canonical orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult<S> {
    pub game_type: GameType,
    pub shifts: NeShifts<S>,
    /// Post-shift period demands at the (representative) profile.
    pub s1: S,
    pub s2: S,
    /// Per-agent cost (CP charge plus penalty) at the (representative) profile.
    pub per_agent_cost: Vec<S>,
    pub total_cost: S,
    /// Whether the equilibrium balances the system (`s1 = s2` within tolerance).
    pub balanced: bool,
    pub orientation: Orientation,
}

impl<S: Scalar> EquilibriumResult<S> {
    /// The concrete profile backing this result (the representative one for
    /// hybrid equilibria), in canonical orientation.
    pub fn profile(&self) -> &ShiftProfile<S> {
        match &self.shifts {
            NeShifts::Unique { shifts } => shifts,
            NeShifts::Hybrid(h) => &h.representative,
        }
    }

    /// The profile mapped back to the input period labeling.
    pub fn profile_input_orientation(&self) -> ShiftProfile<S> {
        let mut p = self.profile().clone();
        if self.orientation.is_swapped() {
            for x in &mut p.0 {
                *x = -*x;
            }
        }
        p
    }

    /// Post-shift demands `(period 1, period 2)` in the input labeling.
    pub fn demands_input_orientation(&self) -> (S, S) {
        self.orientation.map_pair((self.s1, self.s2))
    }

    fn from_profile(instance: &GameInstance<S>, game_type: GameType, shifts: NeShifts<S>) -> Self {
        let profile = match &shifts {
            NeShifts::Unique { shifts } => shifts.clone(),
            NeShifts::Hybrid(h) => h.representative.clone(),
        };
        let (s1, s2) = instance.system_demand(&profile);
        let per_agent_cost = agent_costs(instance, &profile);
        let total_cost = per_agent_cost.iter().copied().sum();
        let scale = S::one().max(s1.abs()).max(s2.abs());
        let balanced = (s1 - s2).abs() <= lit::<S>(1e-9) * scale;
        EquilibriumResult {
            game_type,
            shifts,
            s1,
            s2,
            per_agent_cost,
            total_cost,
            balanced,
            orientation: instance.orientation(),
        }
    }
}

// ---------------------------------------------------------------------------
// Two-agent equilibrium
// ---------------------------------------------------------------------------

/// Closed-form equilibrium of a two-agent instance.
///
/// Internally, "agent x" is the agent with the larger balance point (ties to
/// input order), which guarantees `b_x >= 0` after canonicalization; the
/// result is expressed back in input order.
pub fn two_agent_ne<S: Scalar>(instance: &GameInstance<S>) -> Result<EquilibriumResult<S>, NeError> {
    if instance.len() != 2 {
        return Err(NeError::NotTwoAgents(instance.len()));
    }
    let points = instance.derive_points();
    let game_type = instance.classify();
    let eps = lit::<S>(CLASSIFY_EPS);

    // Role designation: x has the larger balance point.
    let (ix, iy) = if points.balance[0] >= points.balance[1] { (0, 1) } else { (1, 0) };
    let (bx, by) = (points.balance[ix], points.balance[iy]);
    let (rx, ry) = (points.critical[ix], points.critical[iy]);
    let b = points.system_balance;

    let (x_star, y_star) = match game_type {
        GameType::Concave => (rx, ry),
        GameType::Quasiconcave => (bx, by),
        GameType::NonConcave => {
            let x_upper = bx > rx + eps;
            let y_lower = by < -ry - eps;
            let y_upper = by > ry + eps;
            if x_upper && y_lower {
                // Both non-capable: the side whose limit binds first pins.
                if b - rx >= -ry {
                    (rx, b - rx)
                } else {
                    (b + ry, -ry)
                }
            } else if x_upper {
                (rx, b - rx)
            } else if y_lower {
                (b + ry, -ry)
            } else if y_upper {
                (b - ry, ry)
            } else {
                // Non-concave classification guarantees a non-capable agent,
                // and b_x >= 0 rules out x being lower non-capable.
                unreachable!("non-concave game without a matching sub-case")
            }
        }
    };

    let mut shifts = vec![S::zero(); 2];
    shifts[ix] = x_star;
    shifts[iy] = y_star;
    Ok(EquilibriumResult::from_profile(
        instance,
        game_type,
        NeShifts::Unique { shifts: ShiftProfile(shifts) },
    ))
}

// ---------------------------------------------------------------------------
// Multi-agent equilibrium
// ---------------------------------------------------------------------------

/// Closed-form equilibrium of a multi-agent instance.
///
/// Concave and quasiconcave games have unique equilibria (critical resp.
/// balance points). Non-concave games yield the hybrid equilibrium: agents
/// are partitioned by the sign of their balance point into the CP-period set
/// (`b_i >= 0`) and the non-CP-period set (`b_i < 0`); one set is pinned
/// agent by agent (`min(r_i, b_i)` for the CP set, `max(-r_i, b_i)` for the
/// non-CP set) and the other covers the balance residual in aggregate. The
/// non-CP set pins preferentially; when the CP set cannot cover the residual
/// the roles flip, and when neither configuration is reachable the whole
/// population is aggregate-determined.
pub fn multi_agent_ne<S: Scalar>(instance: &GameInstance<S>) -> Result<EquilibriumResult<S>, NeError> {
    let points = instance.derive_points();
    let game_type = instance.classify();
    match game_type {
        GameType::Concave => {
            let shifts = ShiftProfile(points.critical.clone());
            Ok(EquilibriumResult::from_profile(instance, game_type, NeShifts::Unique { shifts }))
        }
        GameType::Quasiconcave => {
            let shifts = ShiftProfile(points.balance.clone());
            Ok(EquilibriumResult::from_profile(instance, game_type, NeShifts::Unique { shifts }))
        }
        GameType::NonConcave => hybrid_ne(instance, &points).map(|h| {
            EquilibriumResult::from_profile(instance, game_type, NeShifts::Hybrid(h))
        }),
    }
}

fn hybrid_ne<S: Scalar>(
    instance: &GameInstance<S>,
    points: &DerivedPoints<S>,
) -> Result<HybridShifts<S>, NeError> {
    let n = instance.len();
    let b = points.system_balance;
    // Agents with b_i = 0 join the CP-period set; they shift 0 in every
    // pinned solution, so the choice is payoff-neutral.
    let cp_set: Vec<usize> = (0..n).filter(|&i| points.balance[i] >= S::zero()).collect();
    let ncp_set: Vec<usize> = (0..n).filter(|&i| points.balance[i] < S::zero()).collect();

    let attempt = |pin_cp: bool| -> Option<HybridShifts<S>> {
        let (pinned_set, free_set) = if pin_cp { (&cp_set, &ncp_set) } else { (&ncp_set, &cp_set) };
        let pinned: Vec<(usize, String, S)> = pinned_set
            .iter()
            .map(|&i| {
                let v = if pin_cp {
                    points.critical[i].min(points.balance[i])
                } else {
                    (-points.critical[i]).max(points.balance[i])
                };
                (i, instance.agents()[i].id.clone(), v)
            })
            .collect();
        let pinned_sum: S = pinned.iter().map(|p| p.2).sum();
        let target = b - pinned_sum;
        let alphas: Vec<S> = free_set.iter().map(|&i| instance.agents()[i].penalty).collect();
        // Preferred bounds keep each free agent within its own equilibrium
        // interval; widen to the full critical-point box when the target is
        // only reachable past some balance points.
        let lo: Vec<S> = free_set.iter().map(|&i| -points.critical[i]).collect();
        let hi_family: Vec<S> = free_set
            .iter()
            .map(|&i| points.balance[i].max(-points.critical[i]).min(points.critical[i]))
            .collect();
        let hi_box: Vec<S> = free_set.iter().map(|&i| points.critical[i]).collect();
        let slack = lit::<S>(1e-12) * (S::one() + target.abs());
        let feasible = |lo: &[S], hi: &[S]| {
            let lo_sum: S = lo.iter().copied().sum();
            let hi_sum: S = hi.iter().copied().sum();
            lo_sum - slack <= target && target <= hi_sum + slack
        };
        let strict = feasible(&lo, &hi_family);
        let hi = if strict {
            &hi_family
        } else if feasible(&lo, &hi_box) {
            &hi_box
        } else {
            return None;
        };
        let alloc = water_fill(target, &alphas, &lo, hi);
        let mut representative = vec![S::zero(); n];
        for (k, &i) in free_set.iter().enumerate() {
            representative[i] = alloc[k];
        }
        for &(i, _, v) in &pinned {
            representative[i] = v;
        }
        Some(HybridShifts {
            determined: pinned,
            aggregate_set: free_set.clone(),
            aggregate_target: target,
            representative: ShiftProfile(representative),
            strict,
        })
    };

    // Pin the non-CP set first: its pinned values (balance point when
    // capable, the period-1 critical point otherwise) are the rest points the
    // switched dynamics settles on. When the CP set cannot cover the residual
    // (an upper-non-capable CP side), the roles flip and the CP set pins.
    attempt(false)
        .or_else(|| attempt(true))
        .or_else(|| {
            // Neither pinned configuration leaves the other set a reachable
            // aggregate: balancing needs both sets beyond their pins. The
            // whole population is then determined only in aggregate, and the
            // balanced family lives inside the critical-point box.
            let lo: Vec<S> = points.critical.iter().map(|&r| -r).collect();
            let hi: Vec<S> = points.critical.clone();
            let slack = lit::<S>(1e-12) * (S::one() + b.abs());
            let lo_sum: S = lo.iter().copied().sum();
            let hi_sum: S = hi.iter().copied().sum();
            if !(lo_sum - slack <= b && b <= hi_sum + slack) {
                return None;
            }
            let alphas: Vec<S> = instance.agents().iter().map(|a| a.penalty).collect();
            let alloc = water_fill(b, &alphas, &lo, &hi);
            Some(HybridShifts {
                determined: Vec::new(),
                aggregate_set: (0..n).collect(),
                aggregate_target: b,
                representative: ShiftProfile(alloc),
                strict: false,
            })
        })
        .ok_or_else(|| {
            NeError::OutsideHybridConditions(
                "system balance is unreachable within the agents' critical-point box".into(),
            )
        })
}

/// Minimizes `sum alpha_i x_i^2` subject to `sum x_i = target` and box bounds,
/// by bisecting the shared marginal cost `lambda` in `x_i = lambda / (2 alpha_i)`
/// clamped to the box. The free (unclamped) coordinates end at equal marginal
/// cost `alpha_i x_i`.
pub fn water_fill<S: Scalar>(target: S, alphas: &[S], lo: &[S], hi: &[S]) -> Vec<S> {
    assert_eq!(alphas.len(), lo.len());
    assert_eq!(alphas.len(), hi.len());
    let two = lit::<S>(2.0);
    let x_at = |lambda: S| -> Vec<S> {
        alphas
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&a, (&l, &h))| (lambda / (two * a)).max(l).min(h))
            .collect()
    };
    let sum_at = |lambda: S| x_at(lambda).into_iter().sum::<S>();

    let mut lambda_lo = S::infinity();
    let mut lambda_hi = S::neg_infinity();
    for (&a, (&l, &h)) in alphas.iter().zip(lo.iter().zip(hi)) {
        lambda_lo = lambda_lo.min(two * a * l);
        lambda_hi = lambda_hi.max(two * a * h);
    }
    if sum_at(lambda_lo) >= target {
        return x_at(lambda_lo);
    }
    if sum_at(lambda_hi) <= target {
        return x_at(lambda_hi);
    }
    for _ in 0..200 {
        let mid = (lambda_lo + lambda_hi) / two;
        if sum_at(mid) < target {
            lambda_lo = mid;
        } else {
            lambda_hi = mid;
        }
        if lambda_hi - lambda_lo <= S::epsilon() * (S::one() + lambda_hi.abs()) {
            break;
        }
    }
    let mut x = x_at(lambda_hi);
    // Spread the bisection residual over the unclamped coordinates.
    let resid = target - x.iter().copied().sum::<S>();
    let free_weight: S = alphas
        .iter()
        .zip(x.iter().zip(lo.iter().zip(hi)))
        .filter(|(_, (xi, (l, h)))| *xi > *l && *xi < *h)
        .map(|(&a, _)| S::one() / a)
        .sum();
    if free_weight > S::zero() {
        for (k, &a) in alphas.iter().enumerate() {
            if x[k] > lo[k] && x[k] < hi[k] {
                x[k] += resid * (S::one() / a) / free_weight;
            }
        }
    }
    x
}

// ---------------------------------------------------------------------------
// Deviation oracle
// ---------------------------------------------------------------------------

/// Options for [`verify_ne`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions<S> {
    /// Grid step as a fraction of the largest critical point.
    pub resolution: S,
    /// Maximum tolerated unilateral improvement.
    pub epsilon: S,
}

impl<S: Scalar> Default for VerifyOptions<S> {
    fn default() -> Self {
        VerifyOptions { resolution: lit(1e-3), epsilon: lit(1e-6) }
    }
}

/// One agent's verdict in a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentDeviation<S> {
    pub id: String,
    /// Reference payoff at the candidate profile.
    pub payoff: S,
    /// Best unilateral improvement found (can be negative).
    pub best_improvement: S,
    /// The deviation shift achieving it.
    pub best_shift: S,
}

/// Result of grid-searching unilateral deviations around a candidate profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<S> {
    pub per_agent: Vec<AgentDeviation<S>>,
    pub max_improvement: S,
    pub epsilon: S,
    pub passes: bool,
}

/// Independent equilibrium check: for each agent, sweeps unilateral
/// deviations over the agent's strategy interval `[-r_i, r_i]` (a grid at the
/// requested resolution, augmented with the analytic candidates `-r_i`, `r_i`,
/// `b_i`, the period-flip point, and the current shift) and reports the best
/// payoff improvement found.
///
/// When a profile lands exactly on the switching surface, the charged period
/// is formally ambiguous and each agent's attainable payoff is the better of
/// the two period branches; the oracle therefore scores on-surface points
/// with the per-agent branch maximum. Off the surface the literal indicator
/// payoff applies.
pub fn verify_ne<S: Scalar>(
    instance: &GameInstance<S>,
    shifts: &ShiftProfile<S>,
    options: VerifyOptions<S>,
) -> VerificationReport<S> {
    let points = instance.derive_points();
    let pi = instance.cp_price();
    let r_max = points.critical.iter().copied().fold(S::zero(), S::max);
    let step = (options.resolution * r_max).max(lit::<S>(1e-12));
    let total: S = shifts.sum();
    let (s_b1, s_b2) = instance.baseline_demands();

    let payoff_at = |i: usize, xi: S| -> S {
        let others = total - shifts.0[i];
        let s1 = s_b1 + others + xi;
        let s2 = s_b2 - others - xi;
        let (f1, f2) = period_payoffs(&instance.agents()[i], xi, pi);
        let scale = S::one().max(s1.abs()).max(s2.abs());
        if (s1 - s2).abs() <= lit::<S>(1e-9) * scale {
            f1.max(f2)
        } else if s1 > s2 {
            f1
        } else {
            f2
        }
    };

    let mut per_agent = Vec::with_capacity(instance.len());
    let mut max_improvement = S::neg_infinity();
    for i in 0..instance.len() {
        let r = points.critical[i];
        let b_i = points.balance[i];
        let current = shifts.0[i];
        let reference = payoff_at(i, current);

        let mut best_improvement = S::zero();
        let mut best_shift = current;
        let mut consider = |xi: S| {
            if xi < -r || xi > r {
                return;
            }
            let gain = payoff_at(i, xi) - reference;
            if gain > best_improvement {
                best_improvement = gain;
                best_shift = xi;
            }
        };

        let mut xi = -r;
        while xi <= r {
            consider(xi);
            xi += step;
        }
        // Analytic candidates: box ends, own balance point, and the shift
        // that lands this agent exactly on the switching surface.
        let flip = points.system_balance - (total - current);
        let nudge = step * lit::<S>(1e-3);
        for cand in [
            -r,
            r,
            b_i,
            flip,
            flip - nudge,
            flip + nudge,
            current,
        ] {
            consider(cand);
        }

        max_improvement = max_improvement.max(best_improvement);
        per_agent.push(AgentDeviation {
            id: instance.agents()[i].id.clone(),
            payoff: reference,
            best_improvement,
            best_shift,
        });
    }

    VerificationReport {
        per_agent,
        max_improvement,
        epsilon: options.epsilon,
        passes: max_improvement <= options.epsilon,
    }
}

/// Realized CP period at a result's profile.
pub fn realized_cp_period<S: Scalar>(result: &EquilibriumResult<S>) -> Period {
    cp_period(result.s1, result.s2)
}

// ---------------------------------------------------------------------------
