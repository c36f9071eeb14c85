//! Experiment pipelines around the shaving-game engine: the canonical case
//! studies, the agent-number Monte Carlo sweep, and the coincident-peak
//! demand-record pipeline with its synthetic data generator.
//!
//! Every randomized pipeline draws from per-sample ChaCha streams, so results
//! are reproducible byte for byte from a single seed, with or without
//! parallelism.

pub mod case_studies;
pub mod records;
pub mod realworld;
pub mod rng;
pub mod sweep;

pub use case_studies::{run_case_studies, CaseReport, CaseStudyReport};
pub use records::{generate_synthetic_records, ingest_cp_records, CpRecord, RecordError};
pub use realworld::{build_real_world_instance, real_world_study, LevelSummary, RealWorldConfig, RealWorldReport};
pub use sweep::{agent_number_sweep, SweepConfig, SweepError, SweepReport, SweepRow};
