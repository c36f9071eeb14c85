//! Agent-number Monte Carlo sweep: for each population size, draw random
//! instances whose imbalance stays inside the pooled shifting limits
//! (`-sum r < b < sum r`, so only quasiconcave and non-concave games are
//! admitted), solve in closed form, and record the efficiency-loss
//! distribution.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use cpshave_core::benchmark::{centralized_solve, efficiency_loss, peak_ratio};
use cpshave_core::closed_form::{multi_agent_ne, two_agent_ne};
use cpshave_core::game::{Agent, GameInstance, GameType};

use crate::rng::{sample_rng, Domain};

/// Sweep parameters. The reference study runs agent counts 2..=50 with
/// 1000 samples each, demands in (0, 15) and penalties in (0, 0.5).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub samples_per_n: usize,
    /// Uniform range for each per-period baseline demand (kW).
    pub demand_range: (f64, f64),
    /// Uniform range for the shifting penalty; draws below 1e-6 are redrawn.
    pub penalty_range: (f64, f64),
    pub seed: u64,
    /// Admission rule for drawn instances.
    #[serde(default)]
    pub filter: AdmissionRule,
    /// Redraw budget per admitted sample.
    #[serde(default = "default_budget")]
    pub rejection_budget: usize,
}

fn default_budget() -> usize {
    10_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissionRule {
    /// Imbalance strictly inside the pooled shifting limits; excludes only
    /// concave draws.
    #[default]
    WithinPooledLimits,
    /// Admit everything.
    All,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let (d_lo, d_hi) = self.demand_range;
        let (p_lo, p_hi) = self.penalty_range;
        if self.n_min < 2 || self.n_max < self.n_min {
            return Err(SweepError::BadConfig("need 2 <= n_min <= n_max".into()));
        }
        if self.samples_per_n == 0 {
            return Err(SweepError::BadConfig("samples_per_n must be positive".into()));
        }
        if !(d_lo >= 0.0 && d_hi > d_lo && p_lo >= 0.0 && p_hi > p_lo) {
            return Err(SweepError::BadConfig("ranges must be positive and ordered".into()));
        }
        Ok(())
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_min: 2,
            n_max: 50,
            samples_per_n: 1000,
            demand_range: (0.0, 15.0),
            penalty_range: (0.0, 0.5),
            seed: 0,
            filter: AdmissionRule::default(),
            rejection_budget: default_budget(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    BadConfig(String),
}

/// One admitted sample.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub sample: usize,
    pub game_type: GameType,
    pub efficiency_loss: f64,
    pub peak_ratio: f64,
}

/// Distribution statistics for one agent count.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub n: usize,
    pub samples: usize,
    pub skipped: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    /// Box-plot outliers: beyond 1.5 IQR from the quartiles.
    pub outliers: usize,
    pub quasiconcave_fraction: f64,
    pub non_concave_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub summaries: Vec<SweepSummary>,
}

impl SweepReport {
    /// `n,sample,game_type,efficiency_loss,peak_ratio` rows.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("n,sample,game_type,efficiency_loss,peak_ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                r.sample,
                game_type_label(r.game_type),
                r.efficiency_loss,
                r.peak_ratio
            ));
        }
        out
    }

    /// Per-agent-count summary rows.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "n,samples,skipped,median,q1,q3,iqr,outliers,quasiconcave_fraction,non_concave_fraction\n",
        );
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                s.n, s.samples, s.skipped, s.median, s.q1, s.q3, s.iqr, s.outliers,
                s.quasiconcave_fraction, s.non_concave_fraction
            ));
        }
        out
    }
}

pub fn game_type_label(t: GameType) -> &'static str {
    match t {
        GameType::Concave => "concave",
        GameType::Quasiconcave => "quasiconcave",
        GameType::NonConcave => "non_concave",
    }
}

/// Runs the sweep. Samples are independent and evaluated in parallel; the
/// per-sample RNG streams make the output a pure function of the config.
pub fn agent_number_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    config.validate()?;
    let counts: Vec<usize> = (config.n_min..=config.n_max).collect();
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &n in &counts {
        let results: Vec<Option<SweepRow>> = (0..config.samples_per_n)
            .into_par_iter()
            .map(|sample| run_sample(config, n, sample))
            .collect();
        let mut n_rows: Vec<SweepRow> = Vec::with_capacity(results.len());
        let mut skipped = 0usize;
        for r in results {
            match r {
                Some(row) => n_rows.push(row),
                None => skipped += 1,
            }
        }
        summaries.push(summarize(n, &n_rows, skipped));
        rows.extend(n_rows);
    }
    Ok(SweepReport { rows, summaries })
}

fn run_sample(config: &SweepConfig, n: usize, sample: usize) -> Option<SweepRow> {
    let mut rng = sample_rng(config.seed, Domain::Sweep, n as u64, sample as u64);
    let (d_lo, d_hi) = config.demand_range;
    let (p_lo, p_hi) = config.penalty_range;
    for _ in 0..config.rejection_budget {
        let agents: Vec<Agent<f64>> = (0..n)
            .map(|i| {
                let penalty = loop {
                    let a = rng.random_range(p_lo..p_hi);
                    // Vanishing penalties blow up the critical points.
                    if a >= 1e-6 {
                        break a;
                    }
                };
                Agent::new(
                    format!("a{i}"),
                    rng.random_range(d_lo..d_hi),
                    rng.random_range(d_lo..d_hi),
                    penalty,
                )
            })
            .collect();
        let instance = match GameInstance::new(agents, 1.0) {
            Ok(g) => g,
            Err(_) => continue,
        };
        if config.filter == AdmissionRule::WithinPooledLimits {
            let points = instance.derive_points();
            let r_sum = points.critical_sum();
            let b = points.system_balance;
            if !(-r_sum < b && b < r_sum) {
                continue;
            }
        }
        // Two-agent games have a unique equilibrium; larger games use the
        // hybrid structure with its representative allocation.
        let ne = if n == 2 { two_agent_ne(&instance) } else { multi_agent_ne(&instance) };
        let ne = match ne {
            Ok(ne) => ne,
            Err(_) => continue,
        };
        let cen = centralized_solve(&instance);
        return Some(SweepRow {
            n,
            sample,
            game_type: ne.game_type,
            efficiency_loss: efficiency_loss(&instance, ne.profile(), &cen),
            peak_ratio: peak_ratio(&instance, ne.profile(), &cen),
        });
    }
    None
}

fn summarize(n: usize, rows: &[SweepRow], skipped: usize) -> SweepSummary {
    let mut losses: Vec<f64> = rows.iter().map(|r| r.efficiency_loss).collect();
    losses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile(&losses, 0.25);
    let median = quantile(&losses, 0.5);
    let q3 = quantile(&losses, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let outliers = losses.iter().filter(|&&p| p < lo_fence || p > hi_fence).count();
    let quasi = rows.iter().filter(|r| r.game_type == GameType::Quasiconcave).count();
    let non_concave = rows.iter().filter(|r| r.game_type == GameType::NonConcave).count();
    let total = rows.len().max(1) as f64;
    SweepSummary {
        n,
        samples: rows.len(),
        skipped,
        median,
        q1,
        q3,
        iqr,
        outliers,
        quasiconcave_fraction: quasi as f64 / total,
        non_concave_fraction: non_concave as f64 / total,
    }
}

/// Linearly interpolated quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}
