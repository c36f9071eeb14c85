//! `cpshave`: classify coincident-peak shaving games, compute equilibria in
//! closed form or by the switched gradient dynamics, benchmark them against
//! the centralized optimum, and run the Monte Carlo studies.
//!
//! Exit codes: 0 = computation completed (solver non-convergence is still 0,
//! flagged in the payload), 1 = internal error, 2 = invalid input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use cpshave_core::benchmark::{self, centralized_solve, efficiency_loss, peak_ratio};
use cpshave_core::closed_form::{
    multi_agent_ne, two_agent_ne, EquilibriumResult, NeShifts, VerificationReport, VerifyOptions,
};
use cpshave_core::dynamics::{lyapunov_values, solve, ConvergenceMode, SolverConfig, Trajectory};
use cpshave_core::game::{
    agent_costs, Agent, AgentCapability, GameInstance, Orientation, Period, ShiftProfile,
};
use cpshave_experiments::case_studies::run_case_studies;
use cpshave_experiments::records::{generate_synthetic_records, ingest_cp_records, records_to_csv};
use cpshave_experiments::realworld::{real_world_study, RealWorldConfig};
use cpshave_experiments::sweep::{agent_number_sweep, game_type_label, SweepConfig};

// ---------------------------------------------------------------------------
// Command-line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "cpshave",
    about = "Coincident-peak demand-charge shaving: game classification, equilibria, dynamics, benchmarks",
    version,
    after_help = "Exit codes: 0 = computation completed (solver non-convergence is flagged in the \
                  payload, not an error), 1 = internal error, 2 = invalid input.\n\
                  Set CPSHAVE_THREADS to pin the worker-thread count."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify an instance: derived points, per-agent capability, game type.
    Classify(ClassifyArgs),
    /// Compute an equilibrium (closed form or switched gradient dynamics).
    Solve(SolveArgs),
    /// Benchmark an equilibrium against the centralized optimum.
    Benchmark(BenchmarkArgs),
    /// Run the bundled case studies and print the comparison table.
    Cases(CasesArgs),
    /// Agent-number Monte Carlo sweep.
    Sweep(SweepArgs),
    /// Demand-record pipeline across variation levels.
    Realworld(RealworldArgs),
    /// Generate a synthetic CP demand-record file.
    GenRecords(GenRecordsArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Instance JSON file.
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance JSON file.
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Closed)]
    method: Method,
    /// Run the deviation oracle on the result.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Instead of solving, evaluate a shift profile from this JSON file
    /// (a bare array or an object with a "shifts" field).
    #[arg(long)]
    evaluate: Option<PathBuf>,
    /// Write the dynamics trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    /// Record every k-th iterate in the trajectory.
    #[arg(long, default_value_t = 1)]
    every: usize,
    #[command(flatten)]
    solver: SolverOverrides,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Also solve with the dynamics and report its efficiency loss.
    #[arg(long)]
    dynamics: bool,
    #[command(flatten)]
    solver: SolverOverrides,
}

#[derive(Args)]
struct CasesArgs {
    /// Emit the full report as JSON instead of the table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config JSON (seed required).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for sweep.csv and sweep_summary.csv.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RealworldArgs {
    /// CP record CSV (`participant_id,cp1,cp2,cp3,cp4`).
    #[arg(long)]
    records: PathBuf,
    /// Study config JSON (cp_price and seed required).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the participant, sample, and summary CSVs.
    #[arg(long)]
    out: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct GenRecordsArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 136)]
    participants: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverOverrides {
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    tau0: Option<f64>,
    #[arg(long)]
    eps_grad: Option<f64>,
    #[arg(long)]
    eps_gap: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    max_backtracks: Option<u32>,
}

impl SolverOverrides {
    fn apply(&self, mut config: SolverConfig<f64>) -> SolverConfig<f64> {
        if let Some(v) = self.beta1 {
            config.beta1 = v;
        }
        if let Some(v) = self.beta2 {
            config.beta2 = v;
        }
        if let Some(v) = self.tau0 {
            config.tau0 = v;
        }
        if let Some(v) = self.eps_grad {
            config.eps_grad = v;
        }
        if let Some(v) = self.eps_gap {
            config.eps_gap = v;
        }
        if let Some(v) = self.max_iters {
            config.max_iters = v;
        }
        if let Some(v) = self.max_backtracks {
            config.max_backtracks = v;
        }
        config
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Closed,
    Dynamics,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

// ---------------------------------------------------------------------------
// Error-to-exit-code mapping
// ---------------------------------------------------------------------------

enum CliError {
    /// Unusable input: exit 2.
    BadInput(String),
    /// Everything else: exit 1.
    Internal(String),
}

impl CliError {
    fn bad(msg: impl Into<String>) -> Self {
        CliError::BadInput(msg.into())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    let result = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Benchmark(args) => cmd_benchmark(args),
        Command::Cases(args) => cmd_cases(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Realworld(args) => cmd_realworld(args),
        Command::GenRecords(args) => cmd_gen_records(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// Default thread count comes from CPSHAVE_THREADS when set.
fn init_thread_pool() {
    if let Ok(threads) = std::env::var("CPSHAVE_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

// ---------------------------------------------------------------------------
// Instance file format
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    cp_price: f64,
    agents: Vec<AgentSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
struct AgentSpec {
    id: String,
    demand_p1: f64,
    demand_p2: f64,
    penalty: f64,
}

fn load_instance(path: &Path) -> Result<GameInstance<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::bad(format!("cannot read {}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .map_err(|e| CliError::bad(format!("{}: {e}", path.display())))?;
    let agents = file
        .agents
        .into_iter()
        .map(|a| Agent::new(a.id, a.demand_p1, a.demand_p2, a.penalty))
        .collect();
    GameInstance::new(agents, file.cp_price).map_err(|e| CliError::bad(e.to_string()))
}

// ---------------------------------------------------------------------------
// Orientation-aware payload builders
// ---------------------------------------------------------------------------

fn orientation_label(o: Orientation) -> &'static str {
    match o {
        Orientation::Original => "original",
        Orientation::Swapped => "swapped",
    }
}

fn capability_label(c: AgentCapability) -> &'static str {
    match c {
        AgentCapability::Capable => "capable",
        AgentCapability::UpperNonCapable => "upper_non_capable",
        AgentCapability::LowerNonCapable => "lower_non_capable",
    }
}

fn period_label(p: Period) -> u8 {
    p.index()
}

/// Equilibrium payload in the input period labeling.
fn equilibrium_payload(
    instance: &GameInstance<f64>,
    result: &EquilibriumResult<f64>,
) -> serde_json::Value {
    let o = instance.orientation();
    let shifts = result.profile_input_orientation();
    let (s1, s2) = result.demands_input_orientation();
    let mut payload = json!({
        "orientation": orientation_label(o),
        "game_type": game_type_label(result.game_type),
        "shifts": shifts.0,
        "s1": s1,
        "s2": s2,
        "balanced": result.balanced,
        "per_agent_cost": result.per_agent_cost,
        "total_cost": result.total_cost,
        "negative_demand_agents": instance
            .negative_demand_agents(result.profile())
            .iter()
            .map(|&i| instance.agents()[i].id.clone())
            .collect::<Vec<_>>(),
    });
    if let NeShifts::Hybrid(h) = &result.shifts {
        payload["hybrid"] = json!({
            "determined": h.determined.iter().map(|(_, id, v)| {
                json!({"id": id, "shift": o.map_shift(*v)})
            }).collect::<Vec<_>>(),
            "aggregate_set": h.aggregate_set.iter()
                .map(|&i| instance.agents()[i].id.clone()).collect::<Vec<_>>(),
            "aggregate_target": o.map_shift(h.aggregate_target),
            "strict": h.strict,
        });
    }
    payload
}

fn verification_payload(instance: &GameInstance<f64>, report: &VerificationReport<f64>) -> serde_json::Value {
    let o = instance.orientation();
    json!({
        "passes": report.passes,
        "epsilon": report.epsilon,
        "max_improvement": report.max_improvement,
        "per_agent": report.per_agent.iter().map(|a| json!({
            "id": a.id,
            "payoff": a.payoff,
            "best_improvement": a.best_improvement,
            "best_shift": o.map_shift(a.best_shift),
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(args: ClassifyArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let o = instance.orientation();
    let points = instance.derive_points();
    let capabilities = instance.classify_agents();
    let game_type = instance.classify();
    let (s_b1, s_b2) = o.map_pair(instance.baseline_demands());

    match args.format {
        Format::Json => {
            let payload = json!({
                "orientation": orientation_label(o),
                "game_type": game_type_label(game_type),
                "cp_price": instance.cp_price(),
                "system": {
                    "baseline_p1": s_b1,
                    "baseline_p2": s_b2,
                    "balance": o.map_shift(points.system_balance),
                    "average": points.system_average,
                },
                "agents": instance.agents().iter().enumerate().map(|(i, a)| json!({
                    "id": a.id,
                    "critical": points.critical[i],
                    "balance": o.map_shift(points.balance[i]),
                    "capability": capability_label(capabilities[i]),
                })).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&payload).unwrap());
        }
        Format::Csv => {
            println!("id,critical,balance,capability");
            for (i, a) in instance.agents().iter().enumerate() {
                println!(
                    "{},{},{},{}",
                    a.id,
                    points.critical[i],
                    o.map_shift(points.balance[i]),
                    capability_label(capabilities[i])
                );
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

fn cmd_solve(args: SolveArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;

    if let Some(shift_file) = &args.evaluate {
        return evaluate_profile(&instance, shift_file, args.format);
    }

    let mut payload;
    let profile_canonical;
    match args.method {
        Method::Closed => {
            let result = if instance.len() == 2 {
                two_agent_ne(&instance)
            } else {
                multi_agent_ne(&instance)
            }
            .map_err(|e| CliError::bad(e.to_string()))?;
            payload = equilibrium_payload(&instance, &result);
            payload["method"] = json!("closed_form");
            profile_canonical = result.profile().clone();
        }
        Method::Dynamics => {
            let config = args.solver.apply({
                let mut c = SolverConfig::defaults_for(&instance);
                c.record_every = args.every.max(1);
                c
            });
            let start = ShiftProfile::zeros(instance.len());
            let trajectory =
                solve(&instance, &start, &config).map_err(|e| CliError::bad(e.to_string()))?;
            if let Some(path) = &args.trajectory {
                write_trajectory_csv(&instance, &trajectory, path)?;
            }
            payload = dynamics_payload(&instance, &trajectory);
            payload["method"] = json!("dynamics");
            if !trajectory.converged {
                eprintln!(
                    "warning: solver hit the iteration cap ({}) without converging",
                    trajectory.iterations
                );
            }
            profile_canonical = trajectory.final_shifts.clone();
        }
    }

    if args.verify {
        let report = cpshave_core::closed_form::verify_ne(
            &instance,
            &profile_canonical,
            VerifyOptions::default(),
        );
        payload["verification"] = verification_payload(&instance, &report);
    }

    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&payload).unwrap()),
        Format::Csv => {
            let shifts = payload["shifts"].as_array().unwrap().clone();
            let costs = payload["per_agent_cost"].as_array().unwrap().clone();
            println!("id,shift,cost");
            for ((a, s), c) in instance.agents().iter().zip(&shifts).zip(&costs) {
                println!("{},{},{}", a.id, s, c);
            }
        }
    }
    Ok(())
}

fn dynamics_payload(instance: &GameInstance<f64>, trajectory: &Trajectory<f64>) -> serde_json::Value {
    let o = instance.orientation();
    let shifts: Vec<f64> = trajectory
        .final_shifts
        .0
        .iter()
        .map(|&x| o.map_shift(x))
        .collect();
    let (s1, s2) = o.map_pair(instance.system_demand(&trajectory.final_shifts));
    let costs = agent_costs(instance, &trajectory.final_shifts);
    let total: f64 = costs.iter().sum();
    let scale = s1.abs().max(s2.abs()).max(1.0);
    json!({
        "orientation": orientation_label(o),
        "game_type": game_type_label(instance.classify()),
        "shifts": shifts,
        "s1": s1,
        "s2": s2,
        "balanced": (s1 - s2).abs() <= 1e-9 * scale,
        "per_agent_cost": costs,
        "total_cost": total,
        "converged": trajectory.converged,
        "iterations": trajectory.iterations,
        "convergence_mode": trajectory.convergence_mode.map(|m| match m {
            ConvergenceMode::GradientZero => "gradient_zero",
            ConvergenceMode::SwitchingSurface => "switching_surface",
        }),
        "negative_demand_agents": instance
            .negative_demand_agents(&trajectory.final_shifts)
            .iter()
            .map(|&i| instance.agents()[i].id.clone())
            .collect::<Vec<_>>(),
    })
}

/// Re-ingests a shift profile (input orientation) and reports the demand and
/// cost figures it induces.
fn evaluate_profile(instance: &GameInstance<f64>, path: &Path, format: Format) -> CliResult {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::bad(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::bad(format!("{}: {e}", path.display())))?;
    let raw = value
        .as_array()
        .cloned()
        .or_else(|| value.get("shifts").and_then(|s| s.as_array()).cloned())
        .ok_or_else(|| CliError::bad("expected a JSON array or an object with a \"shifts\" array"))?;
    let shifts_input: Vec<f64> = raw
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::bad("shifts must be numbers")))
        .collect::<Result<_, _>>()?;
    let o = instance.orientation();
    let canonical = ShiftProfile(shifts_input.iter().map(|&x| o.map_shift(x)).collect());
    instance
        .check_shifts(&canonical)
        .map_err(|e| CliError::bad(e.to_string()))?;

    let (s1, s2) = o.map_pair(instance.system_demand(&canonical));
    let costs = agent_costs(instance, &canonical);
    let total: f64 = costs.iter().sum();
    let scale = s1.abs().max(s2.abs()).max(1.0);
    let payload = json!({
        "orientation": orientation_label(o),
        "shifts": shifts_input,
        "s1": s1,
        "s2": s2,
        "balanced": (s1 - s2).abs() <= 1e-9 * scale,
        "per_agent_cost": costs,
        "total_cost": total,
        "negative_demand_agents": instance
            .negative_demand_agents(&canonical)
            .iter()
            .map(|&i| instance.agents()[i].id.clone())
            .collect::<Vec<_>>(),
    });
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&payload).unwrap()),
        Format::Csv => {
            println!("id,shift,cost");
            for ((a, s), c) in instance.agents().iter().zip(&shifts_input).zip(&costs) {
                println!("{},{},{}", a.id, s, c);
            }
        }
    }
    Ok(())
}

/// Trajectory CSV in the input labeling:
/// `iter,period,x_<id>...,S1,S2,V1,V2,payoff_gap`.
fn write_trajectory_csv(
    instance: &GameInstance<f64>,
    trajectory: &Trajectory<f64>,
    path: &Path,
) -> CliResult {
    let o = instance.orientation();
    let mut out = String::from("iter,period");
    for a in instance.agents() {
        out.push_str(&format!(",x_{}", a.id));
    }
    out.push_str(",S1,S2,V1,V2,payoff_gap\n");
    for (k, iterate) in trajectory.iterates.iter().enumerate() {
        let (s1, s2) = o.map_pair(instance.system_demand(iterate));
        let (v1, v2) = o.map_pair(lyapunov_values(instance, iterate));
        out.push_str(&format!(
            "{},{}",
            trajectory.sample_iters[k],
            period_label(o.map_period(trajectory.active_period[k]))
        ));
        for &x in &iterate.0 {
            out.push_str(&format!(",{}", o.map_shift(x)));
        }
        out.push_str(&format!(",{s1},{s2},{v1},{v2},{}\n", trajectory.payoff_gap[k]));
    }
    fs::write(path, out)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

fn cmd_benchmark(args: BenchmarkArgs) -> CliResult {
    let instance = load_instance(&args.instance)?;
    let o = instance.orientation();
    let result = if instance.len() == 2 {
        two_agent_ne(&instance)
    } else {
        multi_agent_ne(&instance)
    }
    .map_err(|e| CliError::bad(e.to_string()))?;
    let report = benchmark::report(&instance, result.profile());

    let map_shifts = |s: &ShiftProfile<f64>| -> Vec<f64> {
        s.0.iter().map(|&x| o.map_shift(x)).collect()
    };
    let mut payload = json!({
        "orientation": orientation_label(o),
        "game_type": game_type_label(report.game_type),
        "centralized_shifts": map_shifts(&report.centralized_shifts),
        "centralized_cost": report.centralized_cost,
        "game_shifts": map_shifts(&report.game_shifts),
        "game_cost": report.game_cost,
        "peak_ratio": report.peak_ratio,
        "efficiency_loss": report.efficiency_loss,
        "marginal_cost": report.marginal_cost.iter().map(|&m| o.map_shift(m)).collect::<Vec<_>>(),
        "marginal_gap": report.marginal_gap,
        "identity_residual": report.identity_residual,
    });

    if args.dynamics {
        let config = args.solver.apply(SolverConfig::defaults_for(&instance));
        let trajectory = solve(&instance, &ShiftProfile::zeros(instance.len()), &config)
            .map_err(|e| CliError::bad(e.to_string()))?;
        let cen = centralized_solve(&instance);
        payload["dynamics"] = json!({
            "converged": trajectory.converged,
            "iterations": trajectory.iterations,
            "efficiency_loss": efficiency_loss(&instance, &trajectory.final_shifts, &cen),
            "peak_ratio": peak_ratio(&instance, &trajectory.final_shifts, &cen),
        });
    }

    println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    Ok(())
}

// ---------------------------------------------------------------------------
// cases / sweep / realworld / gen-records
// ---------------------------------------------------------------------------

fn cmd_cases(args: CasesArgs) -> CliResult {
    let report = run_case_studies();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        print!("{}", report.render_table());
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CliResult {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::bad(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::bad(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = agent_number_sweep(&config).map_err(|e| CliError::bad(e.to_string()))?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    let rows_path = args.out.join("sweep.csv");
    let summary_path = args.out.join("sweep_summary.csv");
    fs::write(&rows_path, report.rows_csv())
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", rows_path.display())))?;
    fs::write(&summary_path, report.summary_csv())
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", summary_path.display())))?;

    for s in &report.summaries {
        println!(
            "n={} samples={} skipped={} median={:.4} iqr={:.4} non_concave={:.3}",
            s.n, s.samples, s.skipped, s.median, s.iqr, s.non_concave_fraction
        );
    }
    Ok(())
}

fn cmd_realworld(args: RealworldArgs) -> CliResult {
    let ingested = ingest_cp_records(&args.records).map_err(|e| CliError::bad(e.to_string()))?;
    if !ingested.excluded_zero.is_empty() {
        eprintln!(
            "note: excluded {} zero-demand participant(s): {}",
            ingested.excluded_zero.len(),
            ingested.excluded_zero.join(", ")
        );
    }
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::bad(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config: RealWorldConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::bad(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = real_world_study(&ingested.records, &config);

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", args.out.display())))?;
    for (name, body) in [
        ("realworld.csv", report.participant_csv()),
        ("realworld_samples.csv", report.sample_csv()),
        ("realworld_summary.csv", report.summary_csv()),
    ] {
        let path = args.out.join(name);
        fs::write(&path, body)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }

    for l in &report.levels {
        println!(
            "level={} converged={}/{} median_p={:.4} q3_p={:.4} mean_savings={:.2}",
            l.level, l.converged, l.samples, l.p_median, l.p_q3, l.mean_total_savings
        );
    }
    let failures: usize = report.samples.iter().filter(|s| !s.converged).count();
    if failures > 0 {
        eprintln!("warning: {failures} sample(s) hit the iteration cap");
    }
    Ok(())
}

fn cmd_gen_records(args: GenRecordsArgs) -> CliResult {
    let records = generate_synthetic_records(args.seed, args.participants);
    let csv = records_to_csv(&records);
    match args.out {
        Some(path) => fs::write(&path, csv)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{csv}"),
    }
    Ok(())
}
