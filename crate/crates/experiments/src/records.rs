//! Coincident-peak demand records: CSV ingestion and a seeded synthetic
//! generator standing in for the proprietary per-participant data.
//!
//! File format: header `participant_id,cp1,cp2,cp3,cp4`, one row per
//! participant, demands in kW, one reading per CP event.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::rng::{sample_rng, Domain};

/// One participant's four CP-event demands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpRecord {
    pub participant_id: String,
    pub cp_demands: [f64; 4],
    /// Mean of the four readings; the billed CP demand.
    pub avg_cp_demand: f64,
}

impl CpRecord {
    pub fn new(participant_id: impl Into<String>, cp_demands: [f64; 4]) -> Self {
        let avg_cp_demand = cp_demands.iter().sum::<f64>() / 4.0;
        CpRecord { participant_id: participant_id.into(), cp_demands, avg_cp_demand }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("row {row}: expected 5 comma-separated fields, got {got}")]
    BadShape { row: usize, got: usize },
    #[error("row {row}: {field} is not a number: {value:?}")]
    BadNumber { row: usize, field: &'static str, value: String },
    #[error("row {row}: negative demand {value}")]
    NegativeDemand { row: usize, value: f64 },
    #[error("missing header `participant_id,cp1,cp2,cp3,cp4`")]
    MissingHeader,
    #[error("no usable records")]
    Empty,
    #[error("io: {0}")]
    Io(String),
}

/// Parsed records plus notes about excluded rows.
#[derive(Debug, Clone, Serialize)]
pub struct IngestedRecords {
    pub records: Vec<CpRecord>,
    /// Participants excluded for an all-zero CP vector.
    pub excluded_zero: Vec<String>,
}

/// Reads and validates a record file. Zero-demand participants are excluded
/// (they have no CP exposure), negative demands are errors.
pub fn ingest_cp_records(path: &Path) -> Result<IngestedRecords, RecordError> {
    let text = fs::read_to_string(path).map_err(|e| RecordError::Io(e.to_string()))?;
    parse_cp_records(&text)
}

/// Parses record CSV text; see [`ingest_cp_records`].
pub fn parse_cp_records(text: &str) -> Result<IngestedRecords, RecordError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "participant_id,cp1,cp2,cp3,cp4" => {}
        _ => return Err(RecordError::MissingHeader),
    }
    let mut records = Vec::new();
    let mut excluded_zero = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1; // 1-based, counting the header as row 1
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(RecordError::BadShape { row, got: fields.len() });
        }
        let mut demands = [0.0f64; 4];
        for (k, raw) in fields[1..].iter().enumerate() {
            let value: f64 = raw.trim().parse().map_err(|_| RecordError::BadNumber {
                row,
                field: ["cp1", "cp2", "cp3", "cp4"][k],
                value: raw.trim().to_string(),
            })?;
            if !value.is_finite() {
                return Err(RecordError::BadNumber {
                    row,
                    field: ["cp1", "cp2", "cp3", "cp4"][k],
                    value: raw.trim().to_string(),
                });
            }
            if value < 0.0 {
                return Err(RecordError::NegativeDemand { row, value });
            }
            demands[k] = value;
        }
        let record = CpRecord::new(fields[0].trim(), demands);
        if record.avg_cp_demand == 0.0 {
            excluded_zero.push(record.participant_id);
        } else {
            records.push(record);
        }
    }
    if records.is_empty() {
        return Err(RecordError::Empty);
    }
    Ok(IngestedRecords { records, excluded_zero })
}

/// Seeded synthetic participant records with a wide, plausible spread of CP
/// demand magnitudes (log-uniform base, mild per-event variation).
pub fn generate_synthetic_records(seed: u64, participants: usize) -> Vec<CpRecord> {
    (0..participants)
        .map(|i| {
            let mut rng = sample_rng(seed, Domain::SyntheticRecords, i as u64, 0);
            let base = (rng.random_range(20.0f64.ln()..2000.0f64.ln())).exp();
            let mut demands = [0.0f64; 4];
            for d in &mut demands {
                *d = base * (1.0 + rng.random_range(-0.15..0.15));
            }
            CpRecord::new(format!("P{:03}", i + 1), demands)
        })
        .collect()
}

/// Renders records in the ingestion format.
pub fn records_to_csv(records: &[CpRecord]) -> String {
    let mut out = String::from("participant_id,cp1,cp2,cp3,cp4\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.participant_id, r.cp_demands[0], r.cp_demands[1], r.cp_demands[2], r.cp_demands[3]
        );
    }
    out
}
