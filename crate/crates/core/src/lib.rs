//! Game-theoretic engine for coincident-peak (CP) demand-charge shaving.
//!
//! Two billing periods, many agents. Each agent owns a baseline demand pair
//! and may shift demand between the periods at a quadratic comfort cost; the
//! CP charge bills each agent's consumption during whichever period carries
//! the higher total system demand. This crate provides:
//!
//! - domain types, canonicalization, and game classification ([`game`]),
//! - closed-form Nash equilibria with an independent deviation oracle
//!   ([`closed_form`]),
//! - the switched gradient-play solver with backtracking line search and
//!   Lyapunov monitoring ([`dynamics`]),
//! - the centralized peak-shaving benchmark, peak-shaving ratio and
//!   efficiency loss ([`benchmark`]).
//!
//! All numeric code is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the aliases below fix the default `f64` instantiation.

pub mod benchmark;
pub mod closed_form;
pub mod error;
pub mod game;
pub mod dynamics;
pub mod scalar;

pub use error::ValidationError;
pub use game::{Agent, AgentCapability, DerivedPoints, GameInstance, GameType, Orientation, Period, ShiftProfile};
pub use scalar::Scalar;

/// Default scalar type used by the CLI and the experiment pipelines.
pub type DefaultScalar = f64;

/// `f64` game instance.
pub type Instance = game::GameInstance<f64>;
/// `f64` shift profile.
pub type Shifts = game::ShiftProfile<f64>;
/// `f64` equilibrium result.
pub type Equilibrium = closed_form::EquilibriumResult<f64>;
/// `f64` solver trajectory.
pub type Trajectory64 = dynamics::Trajectory<f64>;
/// `f64` benchmark report.
pub type Benchmark = benchmark::BenchmarkReport<f64>;
