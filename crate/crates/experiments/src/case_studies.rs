//! The four canonical case studies: three two-agent games sharing one
//! baseline with different shifting penalties, and a six-agent non-concave
//! game, each solved in closed form and by the switched dynamics and scored
//! against the centralized benchmark.

use serde::Serialize;

use cpshave_core::benchmark::{centralized_solve, efficiency_loss, peak_ratio};
use cpshave_core::closed_form::{multi_agent_ne, two_agent_ne, EquilibriumResult};
use cpshave_core::dynamics::{solve, SolverConfig};
use cpshave_core::game::{Agent, GameInstance, GameType, ShiftProfile};

/// Two-agent baseline: X = (3, 10), Y = (6, 3), pi = 1; the penalty pair
/// selects the game type.
pub fn two_agent_case(alpha_x: f64, alpha_y: f64) -> GameInstance<f64> {
    GameInstance::new(
        vec![
            Agent::new("x", 3.0, 10.0, alpha_x),
            Agent::new("y", 6.0, 3.0, alpha_y),
        ],
        1.0,
    )
    .expect("canonical two-agent case is valid")
}

/// Case (1): both agents capable, quasiconcave.
pub fn case1() -> GameInstance<f64> {
    two_agent_case(0.1, 0.2)
}

/// Case (2): agent y lower non-capable, non-concave.
pub fn case2() -> GameInstance<f64> {
    two_agent_case(0.1, 0.5)
}

/// Case (3): pooled shifting limits below the imbalance, concave.
pub fn case3() -> GameInstance<f64> {
    two_agent_case(0.6, 0.5)
}

/// The six-agent non-concave study.
pub fn six_agent_case() -> GameInstance<f64> {
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
    .expect("canonical six-agent case is valid")
}

/// One case study's outcome next to its reference figures.
#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub game_type: GameType,
    pub closed_form: EquilibriumResult<f64>,
    pub dynamics_shifts: ShiftProfile<f64>,
    pub dynamics_converged: bool,
    pub dynamics_iterations: usize,
    pub centralized_shifts: ShiftProfile<f64>,
    pub efficiency_loss_closed: f64,
    pub efficiency_loss_dynamics: f64,
    pub peak_ratio_closed: f64,
    /// Reference efficiency loss this case reproduces.
    pub reference_efficiency_loss: f64,
}

/// All four case studies.
#[derive(Debug, Clone, Serialize)]
pub struct CaseStudyReport {
    pub cases: Vec<CaseReport>,
}

impl CaseStudyReport {
    /// Plain-text comparison table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:<13} {:>10} {:>12} {:>10} {:>10}\n",
            "case", "type", "P(closed)", "P(dynamics)", "P(ref)", "peak"
        ));
        for c in &self.cases {
            out.push_str(&format!(
                "{:<10} {:<13} {:>10.4} {:>12.4} {:>10.4} {:>10.6}\n",
                c.name,
                format!("{:?}", c.game_type),
                c.efficiency_loss_closed,
                c.efficiency_loss_dynamics,
                c.reference_efficiency_loss,
                c.peak_ratio_closed,
            ));
        }
        out
    }
}

/// Runs every canonical case through the closed form, the dynamics solver,
/// and the benchmark.
pub fn run_case_studies() -> CaseStudyReport {
    let specs: Vec<(&str, GameInstance<f64>, f64)> = vec![
        ("case1", case1(), 1.125),
        ("case2", case2(), 1.0941),
        ("case3", case3(), 1.0),
        ("six_agent", six_agent_case(), 1.1317),
    ];
    let cases = specs
        .into_iter()
        .map(|(name, instance, reference)| {
            let closed = if instance.len() == 2 {
                two_agent_ne(&instance)
            } else {
                multi_agent_ne(&instance)
            }
            .expect("canonical cases have equilibria");
            let cfg = SolverConfig::defaults_for(&instance);
            let traj = solve(&instance, &ShiftProfile::zeros(instance.len()), &cfg)
                .expect("zero start lies in the stability set");
            let cen = centralized_solve(&instance);
            CaseReport {
                name: name.to_string(),
                game_type: closed.game_type,
                efficiency_loss_closed: efficiency_loss(&instance, closed.profile(), &cen),
                efficiency_loss_dynamics: efficiency_loss(&instance, &traj.final_shifts, &cen),
                peak_ratio_closed: peak_ratio(&instance, closed.profile(), &cen),
                closed_form: closed,
                dynamics_shifts: traj.final_shifts.clone(),
                dynamics_converged: traj.converged,
                dynamics_iterations: traj.iterations,
                centralized_shifts: cen,
                reference_efficiency_loss: reference,
            }
        })
        .collect();
    CaseStudyReport { cases }
}
