//! Switched gradient-play dynamics with backtracking line search.
//!
//! The game system alternates between two linear gradient fields, one per
//! charged period, selected by which period currently carries the peak. The
//! discrete iteration
//!
//! ```text
//! x_{h+1} = x_h + diag(tau_h) F_j(x_h),   j = active period at x_h
//! ```
//!
//! picks each agent's learning rate by Armijo backtracking, where the
//! sufficient-decrease test compares the cost of the period the candidate
//! *lands in* against the cost of the current period. An agent whose test
//! fails down to the backtracking floor sits the step out (`tau_i = 0`):
//! across period switches this gates updates to the agents whose individual
//! peak aligns with the system peak, which is what drives the alternating
//! cost descent toward the switching surface.
//!
//! Two convergence modes:
//! - gradient mode: the period-2 gradient vanishes while the trajectory stays
//!   in period 2 (concave games);
//! - switching-surface mode: the summed per-period payoffs meet
//!   (`|sum f_{i,1} - sum f_{i,2}| < eps_gap`, equivalently the system
//!   balances) and the iterate has stalled.

use serde::Serialize;

use crate::error::SolveError;
use crate::game::{cp_period, period_payoffs, GameInstance, Period, ShiftProfile};
use crate::scalar::{lit, Scalar};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Solver parameters. Defaults come from [`SolverConfig::defaults_for`]:
/// `tau0 = 1 / (4 max alpha)` keeps each per-period linear map contractive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig<S> {
    /// Armijo slope parameter, in `(0, 0.5]`.
    pub beta1: S,
    /// Backtracking shrink factor, in `(0, 1)`.
    pub beta2: S,
    /// Initial learning rate.
    pub tau0: S,
    /// Gradient-norm tolerance for the concave convergence mode.
    pub eps_grad: S,
    /// Payoff-gap tolerance for the switching-surface convergence mode.
    pub eps_gap: S,
    /// Stall threshold on the max per-agent step (switching-surface mode).
    pub eps_step: S,
    /// Iteration cap.
    pub max_iters: usize,
    /// Per-step shrink cap; beyond it the agent's update is gated to zero.
    pub max_backtracks: u32,
    /// Trailing-window length a convergence condition must hold for.
    pub window: usize,
    /// Record every k-th iterate into the trajectory (first and last always).
    pub record_every: usize,
}

impl<S: Scalar> SolverConfig<S> {
    pub fn defaults_for(instance: &GameInstance<S>) -> Self {
        let max_alpha = instance
            .agents()
            .iter()
            .map(|a| a.penalty)
            .fold(S::zero(), S::max);
        SolverConfig {
            beta1: lit(1e-4),
            beta2: lit(0.5),
            tau0: S::one() / (lit::<S>(4.0) * max_alpha),
            eps_grad: lit(1e-8),
            eps_gap: lit(1e-8),
            eps_step: lit(1e-9),
            max_iters: 100_000,
            max_backtracks: 60,
            window: 10,
            record_every: 1,
        }
    }

    fn validate(&self) -> Result<(), SolveError> {
        let ok = self.beta1 > S::zero()
            && self.beta1 <= lit(0.5)
            && self.beta2 > S::zero()
            && self.beta2 < S::one()
            && self.tau0 > S::zero()
            && self.eps_grad > S::zero()
            && self.eps_gap > S::zero()
            && self.eps_step > S::zero()
            && self.max_iters > 0
            && self.window > 0
            && self.record_every > 0;
        if ok {
            Ok(())
        } else {
            Err(SolveError::BadConfig(
                "require 0 < beta1 <= 0.5, 0 < beta2 < 1, positive rates/tolerances, nonzero caps".into(),
            ))
        }
    }
}

/// Which equilibrium condition terminated the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceMode {
    /// Period-2 gradient vanished with the trajectory staying in period 2.
    GradientZero,
    /// Summed period payoffs met on the switching surface.
    SwitchingSurface,
}

/// Recorded run of the switched dynamics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory<S> {
    /// Sampled iterates (every `record_every`-th, plus first and last).
    pub iterates: Vec<ShiftProfile<S>>,
    /// Iteration index of each sample.
    pub sample_iters: Vec<usize>,
    /// Active period at each sample.
    pub active_period: Vec<Period>,
    /// Lyapunov pair `(V1, V2)` at each sample.
    pub lyapunov: Vec<(S, S)>,
    /// `|sum_i f_{i,1} - sum_i f_{i,2}|` at each sample.
    pub payoff_gap: Vec<S>,
    /// Total iterations taken.
    pub iterations: usize,
    pub converged: bool,
    pub convergence_mode: Option<ConvergenceMode>,
    /// Final iterate, regardless of sampling.
    pub final_shifts: ShiftProfile<S>,
}

// ---------------------------------------------------------------------------
// Field evaluations
// ---------------------------------------------------------------------------

/// Gradient of the active-period payoffs: per agent, `-(pi + 2 alpha x)` in
/// period 1 and `pi - 2 alpha x` in period 2.
pub fn gradient<S: Scalar>(
    instance: &GameInstance<S>,
    shifts: &ShiftProfile<S>,
    period: Period,
) -> Vec<S> {
    let pi = instance.cp_price();
    let two = lit::<S>(2.0);
    instance
        .agents()
        .iter()
        .zip(shifts.as_slice())
        .map(|(a, &x)| match period {
            Period::One => -(pi + two * a.penalty * x),
            Period::Two => pi - two * a.penalty * x,
        })
        .collect()
}

/// Lyapunov values `(V1, V2)` of the two period fields:
/// `V_j = sum alpha x^2 -+ pi sum x + pi S_bj`. They coincide exactly on the
/// switching surface.
pub fn lyapunov_values<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> (S, S) {
    let pi = instance.cp_price();
    let (s_b1, s_b2) = instance.baseline_demands();
    let pen: S = instance
        .agents()
        .iter()
        .zip(shifts.as_slice())
        .map(|(a, &x)| a.penalty * x * x)
        .sum();
    let total = shifts.sum();
    (pen + pi * total + pi * s_b1, pen - pi * total + pi * s_b2)
}

/// Membership in the stability set: both Lyapunov values strictly positive.
/// In particular the total shift stays within the system's baseline, so no
/// period's system demand is driven negative.
pub fn stability_set_contains<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> bool {
    let (v1, v2) = lyapunov_values(instance, shifts);
    v1 > S::zero() && v2 > S::zero()
}

/// Absolute gap between the summed period payoffs.
pub fn payoff_gap<S: Scalar>(instance: &GameInstance<S>, shifts: &ShiftProfile<S>) -> S {
    let pi = instance.cp_price();
    let mut f1 = S::zero();
    let mut f2 = S::zero();
    for (a, &x) in instance.agents().iter().zip(shifts.as_slice()) {
        let (p1, p2) = period_payoffs(a, x, pi);
        f1 += p1;
        f2 += p2;
    }
    (f1 - f2).abs()
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

/// Runs the switched dynamics from `start` (commonly all zeros).
///
/// Errors if the start lies outside the stability set or the config is
/// invalid. Hitting the iteration cap is not an error: the trajectory is
/// returned with `converged = false`.
pub fn solve<S: Scalar>(
    instance: &GameInstance<S>,
    start: &ShiftProfile<S>,
    config: &SolverConfig<S>,
) -> Result<Trajectory<S>, SolveError> {
    config.validate()?;
    instance.check_shifts(start)?;
    if !stability_set_contains(instance, start) {
        return Err(SolveError::StartOutsideStabilitySet);
    }

    let n = instance.len();
    let (s_b1, s_b2) = instance.baseline_demands();

    let mut x = start.0.clone();
    let mut traj = Recorder::new(config.record_every);
    traj.push(instance, &ShiftProfile(x.clone()), 0);

    let mut grad_run = 0usize;
    let mut stall_run = 0usize;
    let mut converged = None;
    let mut iter = 0usize;

    while iter < config.max_iters {
        let total: S = x.iter().copied().sum();
        let (s1, s2) = (s_b1 + total, s_b2 - total);
        let j = cp_period(s1, s2);
        let profile = ShiftProfile(x.clone());
        let g = gradient(instance, &profile, j);
        let gnorm2: S = g.iter().map(|&v| v * v).sum();
        let gap = payoff_gap(instance, &profile);

        // Concave-mode check: small period-2 gradient over a trailing window
        // of iterates that all sit in period 2.
        if j == Period::Two && gnorm2.sqrt() < config.eps_grad {
            grad_run += 1;
        } else {
            grad_run = 0;
        }
        if grad_run >= config.window {
            converged = Some(ConvergenceMode::GradientZero);
            break;
        }

        // Line search with balance truncation; if that freezes the whole
        // step while the summed payoffs still disagree, the truncated agents
        // are the only route to the switching surface. Release the CP-side
        // agents first (covering past their balance points falls to them in
        // the pinned structure), and everyone only as a last resort. The
        // truncation re-applies on every later iteration.
        let mut taus = line_search(instance, &x, j, &g, total, config, Release::None);
        for release in [Release::CpSide, Release::All] {
            if taus.iter().any(|&t| t > S::zero()) || gap < config.eps_gap {
                break;
            }
            taus = line_search(instance, &x, j, &g, total, config, release);
        }

        let mut step_inf = S::zero();
        for i in 0..n {
            let dx = taus[i] * g[i];
            x[i] += dx;
            step_inf = step_inf.max(dx.abs());
        }
        iter += 1;
        traj.push(instance, &ShiftProfile(x.clone()), iter);

        // Switching-surface mode: the iterate sits on the surface (summed
        // payoffs meet) and has stopped moving.
        if gap < config.eps_gap && step_inf < config.eps_step {
            stall_run += 1;
        } else {
            stall_run = 0;
        }
        if stall_run >= config.window {
            let final_gap = payoff_gap(instance, &ShiftProfile(x.clone()));
            if final_gap < config.eps_gap {
                converged = Some(ConvergenceMode::SwitchingSurface);
                break;
            }
            stall_run = 0;
        }
    }

    Ok(traj.finish(instance, ShiftProfile(x), iter, converged))
}

/// Which agents the balance truncation is lifted for when a step freezes off
/// the switching surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Release {
    None,
    /// Agents whose balance point is non-negative (the CP-period side).
    CpSide,
    All,
}

/// One gated gradient step: per-agent backtracking, then a composed-candidate
/// re-check of the landing period, with a shrink-and-retry pass when gating
/// zeroes a step that wanted to move (so the switching surface is crossed
/// gently instead of freezing the iteration).
fn line_search<S: Scalar>(
    instance: &GameInstance<S>,
    x: &[S],
    j: Period,
    g: &[S],
    total: S,
    config: &SolverConfig<S>,
    release: Release,
) -> Vec<S> {
    let n = x.len();
    let (s_b1, s_b2) = instance.baseline_demands();
    let mut accepted: Vec<S> = (0..n)
        .map(|i| backtrack_agent(instance, x, i, j, g, total, config, release))
        .collect();
    for _ in 0..=config.max_backtracks {
        let cand_total: S = x
            .iter()
            .zip(g.iter().zip(&accepted))
            .map(|(&xi, (&gi, &ti))| xi + ti * gi)
            .sum();
        let j_land = cp_period(s_b1 + cand_total, s_b2 - cand_total);
        if j_land == j {
            break;
        }
        let mut gated = accepted.clone();
        let mut any_move = false;
        for i in 0..n {
            if gated[i] > S::zero()
                && !armijo_ok(
                    instance,
                    i,
                    x[i],
                    x[i] + gated[i] * g[i],
                    j,
                    j_land,
                    gated[i],
                    g[i] * g[i],
                    config,
                )
            {
                gated[i] = S::zero();
            }
            any_move = any_move || gated[i] > S::zero();
        }
        let wanted_move = accepted.iter().any(|&t| t > S::zero());
        if any_move || !wanted_move {
            accepted = gated;
            break;
        }
        for t in &mut accepted {
            *t *= config.beta2;
        }
    }
    accepted
}

/// Finds the largest admissible `tau` satisfying the Armijo decrease for one
/// agent stepping alone, or zero if none does within the backtrack cap.
///
/// Unless released, period-1 descents stop at the agent's own balance point:
/// past it the agent's individual peak flips out of alignment with the active
/// period, and its realized cost after the next system switch would rise.
/// Period-2 ascents stay free because the baseline-peak period legitimately
/// carries agents past their balance points toward the critical points.
#[allow(clippy::too_many_arguments)]
fn backtrack_agent<S: Scalar>(
    instance: &GameInstance<S>,
    x: &[S],
    i: usize,
    j: Period,
    g: &[S],
    total: S,
    config: &SolverConfig<S>,
    release: Release,
) -> S {
    if g[i] == S::zero() {
        return S::zero();
    }
    let mut tau = config.tau0;
    let b_i = instance.agents()[i].balance_point();
    let truncate = match release {
        Release::None => true,
        Release::CpSide => b_i < S::zero(),
        Release::All => false,
    };
    if truncate && j == Period::One && g[i] < S::zero() {
        let band = lit::<S>(1e-9) * (S::one() + b_i.abs());
        if x[i] >= b_i - band {
            let to_balance = ((b_i - x[i]) / g[i]).max(S::zero());
            tau = tau.min(to_balance);
        }
    }
    if tau <= S::zero() {
        return S::zero();
    }
    let gi2 = g[i] * g[i];
    let (s_b1, s_b2) = instance.baseline_demands();
    for _ in 0..=config.max_backtracks {
        let cand = x[i] + tau * g[i];
        let cand_total = total - x[i] + cand;
        let j_cand = cp_period(s_b1 + cand_total, s_b2 - cand_total);
        if armijo_ok(instance, i, x[i], cand, j, j_cand, tau, gi2, config) {
            return tau;
        }
        tau *= config.beta2;
    }
    S::zero()
}

/// Armijo sufficient decrease in cost terms: the candidate's cost in the
/// period it lands in must undercut the current cost in the current period by
/// `beta1 tau g_i^2` (the agent's own gradient component; summed over agents
/// this reproduces the `||F_j||^2` decrease of the joint step without letting
/// one agent's large gradient gate everyone else's).
///
/// The cost difference is expanded analytically rather than formed by
/// subtracting two nearly equal costs: near a fixed point the raw difference
/// underflows the floating-point resolution of O(1) costs long before the
/// gradient tolerance is reached.
#[allow(clippy::too_many_arguments)]
fn armijo_ok<S: Scalar>(
    instance: &GameInstance<S>,
    i: usize,
    x_now: S,
    x_cand: S,
    j_now: Period,
    j_cand: Period,
    tau: S,
    gi2: S,
    config: &SolverConfig<S>,
) -> bool {
    let pi = instance.cp_price();
    let agent = &instance.agents()[i];
    let two = lit::<S>(2.0);
    let diff = x_cand - x_now;
    let sum = x_cand + x_now;
    let pen = agent.penalty * sum * diff;
    // cost_1(x) = pi (X1 + x) + alpha x^2, cost_2(x) = pi (X2 - x) + alpha x^2.
    let delta = match (j_now, j_cand) {
        (Period::One, Period::One) => pi * diff + pen,
        (Period::Two, Period::Two) => -pi * diff + pen,
        (Period::One, Period::Two) => pi * (two * agent.balance_point() - sum) + pen,
        (Period::Two, Period::One) => pi * (sum - two * agent.balance_point()) + pen,
    };
    delta < -config.beta1 * tau * gi2
}

// ---------------------------------------------------------------------------
// Trajectory recording
// ---------------------------------------------------------------------------

struct Recorder<S> {
    every: usize,
    iterates: Vec<ShiftProfile<S>>,
    sample_iters: Vec<usize>,
    active_period: Vec<Period>,
    lyapunov: Vec<(S, S)>,
    payoff_gap: Vec<S>,
}

impl<S: Scalar> Recorder<S> {
    fn new(every: usize) -> Self {
        Recorder {
            every,
            iterates: Vec::new(),
            sample_iters: Vec::new(),
            active_period: Vec::new(),
            lyapunov: Vec::new(),
            payoff_gap: Vec::new(),
        }
    }

    fn push(&mut self, instance: &GameInstance<S>, x: &ShiftProfile<S>, iter: usize) {
        if !iter.is_multiple_of(self.every) && iter != 0 {
            return;
        }
        self.force_push(instance, x, iter);
    }

    fn force_push(&mut self, instance: &GameInstance<S>, x: &ShiftProfile<S>, iter: usize) {
        let (s1, s2) = instance.system_demand(x);
        self.iterates.push(x.clone());
        self.sample_iters.push(iter);
        self.active_period.push(cp_period(s1, s2));
        self.lyapunov.push(lyapunov_values(instance, x));
        self.payoff_gap.push(payoff_gap(instance, x));
    }

    fn finish(
        mut self,
        instance: &GameInstance<S>,
        x: ShiftProfile<S>,
        iterations: usize,
        mode: Option<ConvergenceMode>,
    ) -> Trajectory<S> {
        if self.sample_iters.last() != Some(&iterations) {
            self.force_push(instance, &x, iterations);
        }
        Trajectory {
            iterates: self.iterates,
            sample_iters: self.sample_iters,
            active_period: self.active_period,
            lyapunov: self.lyapunov,
            payoff_gap: self.payoff_gap,
            iterations,
            converged: mode.is_some(),
            convergence_mode: mode,
            final_shifts: x,
        }
    }
}

// ---------------------------------------------------------------------------
