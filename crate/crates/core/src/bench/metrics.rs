use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use super::RunRecord;
use crate::domain::Complexity;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("no records to aggregate")]
    EmptyRecords,
}

/// Mean and population standard deviation over seeds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

/// Counts and derived rates for one group of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub tasks: usize,
    pub successes: usize,
    pub simple_tasks: usize,
    pub simple_successes: usize,
    pub complex_tasks: usize,
    pub complex_successes: usize,
    pub total_tokens: u64,
    pub total_calls: u64,
    /// Percentages; 0 for an empty class.
    pub simple_acc: f64,
    pub complex_acc: f64,
    pub overall_acc: f64,
    pub mean_tokens: f64,
    pub mean_calls: f64,
    /// Success rate per 10,000 tokens.
    pub token_efficiency: f64,
    /// Success rate per call.
    pub call_efficiency: f64,
}

impl Summary {
    fn of(records: &[&RunRecord]) -> Self {
        let count = |c: Option<Complexity>, success: bool| {
            records
                .iter()
                .filter(|r| c.is_none_or(|c| r.complexity == c))
                .filter(|r| !success || r.verdict.is_success())
                .count()
        };
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let tasks = records.len();
        let successes = count(None, true);
        let total_tokens: u64 = records.iter().map(|r| r.usage.total_tokens()).sum();
        let total_calls: u64 = records.iter().map(|r| r.usage.calls).sum();
        let token_efficiency = if total_tokens == 0 {
            0.0
        } else {
            100.0 * successes as f64 / (total_tokens as f64 / 10_000.0)
        };
        let call_efficiency = if total_calls == 0 {
            if tasks > 0 {
                warn!("no backend calls recorded; call efficiency reported as 0");
            }
            0.0
        } else {
            100.0 * successes as f64 / total_calls as f64
        };
        let (simple_tasks, complex_tasks) = (count(Some(Complexity::Simple), false), count(Some(Complexity::Complex), false));
        let (simple_successes, complex_successes) =
            (count(Some(Complexity::Simple), true), count(Some(Complexity::Complex), true));
        Self {
            tasks,
            successes,
            simple_tasks,
            simple_successes,
            complex_tasks,
            complex_successes,
            total_tokens,
            total_calls,
            simple_acc: pct(simple_successes, simple_tasks),
            complex_acc: pct(complex_successes, complex_tasks),
            overall_acc: pct(successes, tasks),
            mean_tokens: if tasks == 0 { 0.0 } else { total_tokens as f64 / tasks as f64 },
            mean_calls: if tasks == 0 { 0.0 } else { total_calls as f64 / tasks as f64 },
            token_efficiency,
            call_efficiency,
        }
    }
}

/// Spread of the per-seed figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSpread {
    pub simple_acc: MeanStd,
    pub complex_acc: MeanStd,
    pub overall_acc: MeanStd,
    pub mean_tokens: MeanStd,
    pub mean_calls: MeanStd,
    pub token_efficiency: MeanStd,
    pub call_efficiency: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Figures over all records pooled.
    #[serde(flatten)]
    pub pooled: Summary,
    pub per_seed: BTreeMap<u64, Summary>,
    pub across_seeds: SeedSpread,
}

/// Aggregates records. The result does not depend on record order.
pub fn compute_metrics(records: &[RunRecord]) -> Result<MetricsReport, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::EmptyRecords);
    }
    let all: Vec<&RunRecord> = records.iter().collect();
    let mut by_seed: BTreeMap<u64, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        by_seed.entry(r.seed).or_default().push(r);
    }
    let per_seed: BTreeMap<u64, Summary> = by_seed.iter().map(|(s, rs)| (*s, Summary::of(rs))).collect();
    let spread = |f: fn(&Summary) -> f64| MeanStd::of(&per_seed.values().map(f).collect::<Vec<_>>());
    let across_seeds = SeedSpread {
        simple_acc: spread(|s| s.simple_acc),
        complex_acc: spread(|s| s.complex_acc),
        overall_acc: spread(|s| s.overall_acc),
        mean_tokens: spread(|s| s.mean_tokens),
        mean_calls: spread(|s| s.mean_calls),
        token_efficiency: spread(|s| s.token_efficiency),
        call_efficiency: spread(|s| s.call_efficiency),
    };
    Ok(MetricsReport {
        pooled: Summary::of(&all),
        per_seed,
        across_seeds,
    })
}
