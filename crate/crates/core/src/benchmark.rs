//! Centralized peak-shaving benchmark and efficiency-loss analysis.
//!
//! The centralized model hands one planner control over every agent's shift
//! and maximizes the summed payoffs, which collapses to minimizing
//! `pi * max(S1, S2) + sum alpha_i x_i^2`. Its solution either balances the
//! system with shifts proportional to `1/alpha_i` (equal marginal shifting
//! cost) or, when even pooled flexibility cannot balance the system, stops at
//! the critical points. Game equilibria are scored against it through the
//! peak-shaving ratio and the efficiency loss `P >= 1`.

use serde::Serialize;

use crate::error::BenchmarkError;
use crate::game::{agent_costs, GameInstance, GameType, ShiftProfile};
use crate::scalar::{lit, Scalar};

/// Benchmark comparison of a game profile against the centralized optimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport<S> {
    pub game_type: GameType,
    pub centralized_shifts: ShiftProfile<S>,
    pub centralized_cost: S,
    pub game_shifts: ShiftProfile<S>,
    pub game_cost: S,
    /// Game peak demand over centralized peak demand (1 at any equilibrium).
    pub peak_ratio: S,
    /// Game total cost over centralized total cost.
    pub efficiency_loss: S,
    /// Marginal shifting cost `alpha_i x_i` per agent at the game profile.
    pub marginal_cost: Vec<S>,
    /// Mean squared pairwise gap of the marginal shifting costs.
    pub marginal_gap: S,
    /// Residual of the two-agent balanced-equilibrium identity, when defined.
    pub identity_residual: Option<S>,
}

/// Centralized optimum: critical points when the system cannot be balanced
/// (`b > sum r_i`), otherwise the balancing shifts `x_i = b (1/alpha_i) /
/// sum_j (1/alpha_j)`. The branches agree at the boundary.
pub fn centralized_solve<S: Scalar>(instance: &GameInstance<S>) -> ShiftProfile<S> {
    let points = instance.derive_points();
    let b = points.system_balance;
    let r_sum = points.critical_sum();
    if b > r_sum {
        return ShiftProfile(points.critical.clone());
    }
    let inv_sum: S = instance.agents().iter().map(|a| S::one() / a.penalty).sum();
    ShiftProfile(
        instance
            .agents()
            .iter()
            .map(|a| b * (S::one() / a.penalty) / inv_sum)
            .collect(),
    )
}

/// Total system cost of a profile: CP charge on the peak period plus the
/// summed shifting penalties. Identical to the summed per-agent costs.
pub fn total_cost<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> S {
    agent_costs(instance, shifts).into_iter().sum()
}

/// Peak demand after shifting.
pub fn peak_demand<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> S {
    let (s1, s2) = instance.system_demand(shifts);
    s1.max(s2)
}

/// Peak-shaving ratio: game peak over centralized peak.
pub fn peak_ratio<S: Scalar>(
    instance: &GameInstance<S>,
    game_shifts: &ShiftProfile<S>,
    cen_shifts: &ShiftProfile<S>,
) -> S {
    peak_demand(instance, game_shifts) / peak_demand(instance, cen_shifts)
}

/// Efficiency loss `P`: game total cost over centralized total cost, computed
/// in cost form so the concave case is exactly 1 and signs stay positive.
pub fn efficiency_loss<S: Scalar>(
    instance: &GameInstance<S>,
    game_shifts: &ShiftProfile<S>,
    cen_shifts: &ShiftProfile<S>,
) -> S {
    total_cost(instance, game_shifts) / total_cost(instance, cen_shifts)
}

/// Two-agent balanced-equilibrium identity: the cost excess of the game over
/// the centralized optimum, scaled by `alpha_x + alpha_y`, equals the squared
/// marginal-cost gap `(alpha_x x* - alpha_y y*)^2`. Returns the relative
/// residual; rejects concave (unbalanced) instances.
pub fn marginal_gap_identity_check<S: Scalar>(
    instance: &GameInstance<S>,
    game_shifts: &ShiftProfile<S>,
) -> Result<S, BenchmarkError> {
    if instance.len() != 2 {
        return Err(BenchmarkError::NotBalancedTwoAgent);
    }
    let points = instance.derive_points();
    let scale = S::one().max(points.system_balance.abs());
    if (game_shifts.sum() - points.system_balance).abs() > lit::<S>(1e-6) * scale {
        return Err(BenchmarkError::NotBalancedTwoAgent);
    }
    let cen = centralized_solve(instance);
    let a_x = instance.agents()[0].penalty;
    let a_y = instance.agents()[1].penalty;
    let cost_gap = (total_cost(instance, game_shifts) - total_cost(instance, &cen)) * (a_x + a_y);
    let marginal_gap = {
        let d = a_x * game_shifts.0[0] - a_y * game_shifts.0[1];
        d * d
    };
    let denom = S::one().max(cost_gap.abs()).max(marginal_gap.abs());
    Ok((cost_gap - marginal_gap).abs() / denom)
}

/// Full benchmark of a game profile.
pub fn report<S: Scalar>(instance: &GameInstance<S>, game_shifts: &ShiftProfile<S>) -> BenchmarkReport<S> {
    let cen = centralized_solve(instance);
    let game_cost = total_cost(instance, game_shifts);
    let centralized_cost = total_cost(instance, &cen);
    let marginal_cost: Vec<S> = instance
        .agents()
        .iter()
        .zip(game_shifts.as_slice())
        .map(|(a, &x)| a.penalty * x)
        .collect();
    let n = marginal_cost.len();
    let mut gap_sum = S::zero();
    let mut pairs = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = marginal_cost[i] - marginal_cost[j];
            gap_sum += d * d;
            pairs += 1;
        }
    }
    let marginal_gap = if pairs > 0 { gap_sum / lit::<S>(pairs as f64) } else { S::zero() };
    BenchmarkReport {
        game_type: instance.classify(),
        peak_ratio: peak_ratio(instance, game_shifts, &cen),
        efficiency_loss: game_cost / centralized_cost,
        identity_residual: marginal_gap_identity_check(instance, game_shifts).ok(),
        centralized_shifts: cen,
        centralized_cost,
        game_shifts: game_shifts.clone(),
        game_cost,
        marginal_cost,
        marginal_gap,
    }
}

// ---------------------------------------------------------------------------
// Independent numerical oracle
// ---------------------------------------------------------------------------

/// Numerical check of the centralized solution, independent of the
/// closed-form route.
///
/// Up to three agents: exhaustive grid over `[-r_i, r_i]` per axis at the
/// given step (as a fraction of the largest critical point), then local
/// pattern refinement. Larger instances: projected subgradient descent on the
/// convex cost.
pub fn centralized_oracle<S: Scalar>(instance: &GameInstance<S>, resolution: S) -> ShiftProfile<S> {
    let points = instance.derive_points();
    let r_max = points.critical.iter().copied().fold(S::zero(), S::max);
    let step = resolution * r_max;
    if instance.len() <= 3 {
        grid_oracle(instance, &points.critical, step)
    } else {
        subgradient_oracle(instance, r_max)
    }
}

fn grid_oracle<S: Scalar>(instance: &GameInstance<S>, radii: &[S], step: S) -> ShiftProfile<S> {
    let n = instance.len();
    let axis: Vec<Vec<S>> = radii
        .iter()
        .map(|&r| {
            let mut v = Vec::new();
            let mut x = -r;
            while x <= r + step * lit::<S>(0.5) {
                v.push(x.min(r));
                x += step;
            }
            v
        })
        .collect();
    let mut best = vec![S::zero(); n];
    let mut best_cost = total_cost(instance, &ShiftProfile(best.clone()));
    let mut idx = vec![0usize; n];
    'outer: loop {
        let candidate: Vec<S> = idx.iter().enumerate().map(|(k, &i)| axis[k][i]).collect();
        let c = total_cost(instance, &ShiftProfile(candidate.clone()));
        if c < best_cost {
            best_cost = c;
            best = candidate;
        }
        // Odometer increment over the grid.
        for k in 0..n {
            idx[k] += 1;
            if idx[k] < axis[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    // Local pattern refinement below the grid step.
    let mut h = step;
    for _ in 0..60 {
        let mut improved = false;
        for k in 0..n {
            for dir in [-h, h] {
                let mut cand = best.clone();
                cand[k] = (cand[k] + dir).max(-radii[k]).min(radii[k]);
                let c = total_cost(instance, &ShiftProfile(cand.clone()));
                if c < best_cost {
                    best_cost = c;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= lit::<S>(0.5);
        }
    }
    ShiftProfile(best)
}

fn subgradient_oracle<S: Scalar>(instance: &GameInstance<S>, r_max: S) -> ShiftProfile<S> {
    let n = instance.len();
    let pi = instance.cp_price();
    let two = lit::<S>(2.0);
    let mut x = vec![S::zero(); n];
    let mut best = x.clone();
    let mut best_cost = total_cost(instance, &ShiftProfile(x.clone()));
    for k in 0..5000 {
        let (s1, s2) = instance.system_demand(&ShiftProfile(x.clone()));
        let scale = S::one().max(s1.abs()).max(s2.abs());
        let tie = (s1 - s2).abs() <= lit::<S>(1e-9) * scale;
        // Shared multiplier on the charge term; at a tie pick the
        // minimum-norm subgradient element.
        let mu = if tie {
            let sum_ax: S = instance.agents().iter().zip(&x).map(|(a, &v)| a.penalty * v).sum();
            (-two * sum_ax / (pi * lit::<S>(n as f64))).max(-S::one()).min(S::one())
        } else if s1 > s2 {
            S::one()
        } else {
            -S::one()
        };
        let c_k = r_max / lit::<S>((k as f64 + 1.0).sqrt()) * lit::<S>(0.5);
        for (i, a) in instance.agents().iter().enumerate() {
            let g = mu * pi + two * a.penalty * x[i];
            x[i] -= c_k * g;
        }
        let c = total_cost(instance, &ShiftProfile(x.clone()));
        if c < best_cost {
            best_cost = c;
            best = x.clone();
        }
    }
    ShiftProfile(best)
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{multi_agent_ne, two_agent_ne};
    use crate::game::Agent;

    fn two_agent(alpha_x: f64, alpha_y: f64) -> GameInstance<f64> {
        GameInstance::new(
            vec![
                Agent::new("x", 3.0, 10.0, alpha_x),
                Agent::new("y", 6.0, 3.0, alpha_y),
            ],
            1.0,
        )
        .unwrap()
    }

    fn table1() -> GameInstance<f64> {
        GameInstance::new(
            vec![
                Agent::new("1", 7.0, 3.0, 0.2),
                Agent::new("2", 3.0, 13.0, 0.1),
                Agent::new("3", 10.0, 4.0, 0.4),
                Agent::new("4", 1.0, 4.0, 0.5),
                Agent::new("5", 2.0, 6.0, 0.2),
                Agent::new("6", 5.0, 3.0, 0.1),
            ],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn centralized_matches_harmonic_split() {
        // Case (1): b = 2, weights 1/alpha = (10, 5).
        let cen = centralized_solve(&two_agent(0.1, 0.2));
        assert!((cen.0[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((cen.0[1] - 2.0 / 3.0).abs() < 1e-12);
        // Case (3): b exceeds pooled limits, critical points bind.
        let cen = centralized_solve(&two_agent(0.6, 0.5));
        assert!((cen.0[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((cen.0[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centralized_table1_values() {
        let cen = centralized_solve(&table1());
        let inv = [5.0, 10.0, 2.5, 2.0, 5.0, 10.0];
        let inv_sum: f64 = inv.iter().sum();
        for (k, w) in inv.iter().enumerate() {
            assert!((cen.0[k] - 2.5 * w / inv_sum).abs() < 1e-12);
        }
        // Interior first-order conditions: equal marginal cost, sum = b.
        let g = table1();
        let m: Vec<f64> = g
            .agents()
            .iter()
            .zip(&cen.0)
            .map(|(a, &x)| a.penalty * x)
            .collect();
        for w in m.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-9);
        }
        assert!((cen.sum() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn efficiency_losses_match_case_studies() {
        let g1 = two_agent(0.1, 0.2);
        let ne1 = two_agent_ne(&g1).unwrap();
        let cen1 = centralized_solve(&g1);
        let p1 = efficiency_loss(&g1, ne1.profile(), &cen1);
        assert!((p1 - 1.125).abs() < 1e-12, "case 1: {p1}");
        assert!((peak_ratio(&g1, ne1.profile(), &cen1) - 1.0).abs() < 1e-12);

        let g2 = two_agent(0.1, 0.5);
        let ne2 = two_agent_ne(&g2).unwrap();
        let cen2 = centralized_solve(&g2);
        let p2 = efficiency_loss(&g2, ne2.profile(), &cen2);
        assert!((p2 - 37.2 / 34.0).abs() < 1e-12, "case 2: {p2}");
        assert!((p2 - 1.0941).abs() < 1e-4);

        let g3 = two_agent(0.6, 0.5);
        let ne3 = two_agent_ne(&g3).unwrap();
        let cen3 = centralized_solve(&g3);
        assert_eq!(efficiency_loss(&g3, ne3.profile(), &cen3), 1.0);
        assert_eq!(peak_ratio(&g3, ne3.profile(), &cen3), 1.0);
    }

    #[test]
    fn table1_efficiency_loss_at_reported_profile() {
        let g = table1();
        let reported = ShiftProfile(vec![-2.0, 3.85, -1.25, 0.93, 1.97, -1.0]);
        let cen = centralized_solve(&g);
        let p = efficiency_loss(&g, &reported, &cen);
        assert!((p - 1.1317).abs() < 0.002, "p = {p}");
        // And at the hybrid representative.
        let ne = multi_agent_ne(&g).unwrap();
        let p_rep = efficiency_loss(&g, ne.profile(), &cen);
        assert!((1.12..=1.14).contains(&p_rep), "p_rep = {p_rep}");
    }

    #[test]
    fn identity_holds_at_balanced_equilibria() {
        // Case (1): both sides equal 0.4225.
        let g = two_agent(0.1, 0.2);
        let ne = two_agent_ne(&g).unwrap();
        let cen = centralized_solve(&g);
        let lhs = (total_cost(&g, ne.profile()) - total_cost(&g, &cen)) * 0.3;
        assert!((lhs - 0.4225).abs() < 1e-12);
        let resid = marginal_gap_identity_check(&g, ne.profile()).unwrap();
        assert!(resid <= 1e-9, "residual {resid}");

        // Case (2).
        let g = two_agent(0.1, 0.5);
        let ne = two_agent_ne(&g).unwrap();
        let resid = marginal_gap_identity_check(&g, ne.profile()).unwrap();
        assert!(resid <= 1e-9, "residual {resid}");

        // At the centralized point the marginal costs agree: gap 0, P = 1.
        let cen = centralized_solve(&g);
        let resid = marginal_gap_identity_check(&g, &cen).unwrap();
        assert!(resid <= 1e-9);
        assert!((efficiency_loss(&g, &cen, &cen) - 1.0).abs() < 1e-15);

        // Concave instances are rejected.
        let g = two_agent(0.6, 0.5);
        let ne = two_agent_ne(&g).unwrap();
        assert!(marginal_gap_identity_check(&g, ne.profile()).is_err());
    }

    #[test]
    fn grid_oracle_agrees_with_closed_form() {
        for (ax, ay) in [(0.1, 0.2), (0.6, 0.5)] {
            let g = two_agent(ax, ay);
            let cen = centralized_solve(&g);
            let oracle = centralized_oracle(&g, 0.01);
            let r_max = g
                .derive_points()
                .critical
                .iter()
                .copied()
                .fold(0.0f64, f64::max);
            for k in 0..2 {
                assert!(
                    (cen.0[k] - oracle.0[k]).abs() <= 2.0 * 0.01 * r_max,
                    "alpha=({ax},{ay}) coord {k}: {} vs {}",
                    cen.0[k],
                    oracle.0[k]
                );
            }
        }
    }

    #[test]
    fn symmetric_instance_gets_equal_shifts() {
        let g: GameInstance<f64> = GameInstance::new(
            vec![
                Agent::new("a", 2.0, 8.0, 0.25),
                Agent::new("b", 2.0, 8.0, 0.25),
            ],
            1.0,
        )
        .unwrap();
        let oracle = centralized_oracle(&g, 0.005);
        assert!((oracle.0[0] - oracle.0[1]).abs() < 0.05);
        let cen = centralized_solve(&g);
        assert_eq!(cen.0[0], cen.0[1]);
    }

    #[test]
    fn subgradient_oracle_tracks_closed_form_loosely() {
        let g = table1();
        let cen = centralized_solve(&g);
        let oracle = centralized_oracle(&g, 0.01);
        let cost_cf = total_cost(&g, &cen);
        let cost_or = total_cost(&g, &oracle);
        assert!(cost_or >= cost_cf - 1e-9);
        assert!((cost_or - cost_cf) / cost_cf < 1e-3, "{cost_or} vs {cost_cf}");
    }

    #[test]
    fn efficiency_loss_is_monotone_in_marginal_gap() {
        // Sweep baseline splits at fixed totals and penalties: among
        // balanced equilibria, P orders exactly like the squared
        // marginal-cost gap, and the non-concave members tie the boundary of
        // the quasiconcave family.
        let (alpha_x, alpha_y) = (0.12, 0.3);
        let (s_b1, s_b2) = (9.0, 13.0);
        let instance_at = |bx: f64| -> Option<GameInstance<f64>> {
            // Fixed per-agent totals; only the split between periods moves.
            let x1 = 5.0 - bx;
            let x2 = 5.0 + bx;
            let y1 = s_b1 - x1;
            let y2 = s_b2 - x2;
            if x1 < 0.0 || y1 < 0.0 || y2 < 0.0 {
                return None;
            }
            Some(
                GameInstance::new(
                    vec![
                        Agent::new("x", x1, x2, alpha_x),
                        Agent::new("y", y1, y2, alpha_y),
                    ],
                    1.0,
                )
                .unwrap(),
            )
        };
        let mut samples: Vec<(f64, f64)> = Vec::new(); // (gap^2, P)
        let mut quasi_p: Vec<f64> = Vec::new();
        let mut nonconcave_p: Vec<f64> = Vec::new();
        for k in 0..60 {
            let bx = 0.2 + 4.0 * k as f64 / 59.0;
            let g = match instance_at(bx) {
                Some(g) => g,
                None => continue,
            };
            let ne = match two_agent_ne(&g) {
                Ok(ne) => ne,
                Err(_) => continue,
            };
            if !ne.balanced {
                continue;
            }
            let cen = centralized_solve(&g);
            let p = efficiency_loss(&g, ne.profile(), &cen);
            assert!(p >= 1.0 - 1e-9);
            let s = ne.profile();
            let gap = (alpha_x * s.0[0] - alpha_y * s.0[1]).powi(2);
            match ne.game_type {
                GameType::Quasiconcave => {
                    samples.push((gap, p));
                    quasi_p.push(p);
                }
                GameType::NonConcave => nonconcave_p.push(p),
                GameType::Concave => {}
            }
        }
        assert!(!samples.is_empty() && !nonconcave_p.is_empty());
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in samples.windows(2) {
            if w[1].0 - w[0].0 > 1e-12 {
                assert!(w[1].1 >= w[0].1 - 1e-12, "P not monotone in gap^2");
            }
        }
        // Non-concave members freeze at the P of the quasiconcave family
        // boundary (where an agent's balance point meets a critical point),
        // which is also where the family's P peaks.
        let r_y = 1.0 / (2.0 * alpha_y);
        let b = 2.0;
        let boundary_p: Vec<f64> = [b - r_y, b + r_y]
            .into_iter()
            .map(|bx| {
                let g = instance_at(bx).unwrap();
                let ne = two_agent_ne(&g).unwrap();
                let cen = centralized_solve(&g);
                efficiency_loss(&g, ne.profile(), &cen)
            })
            .collect();
        let boundary_max = boundary_p.iter().copied().fold(1.0f64, f64::max);
        for p in &nonconcave_p {
            assert!(
                boundary_p.iter().any(|bp| (p - bp).abs() < 1e-9),
                "non-concave P {p} off the boundary values {boundary_p:?}"
            );
        }
        for p in &quasi_p {
            assert!(*p <= boundary_max + 1e-9);
        }
    }
}
