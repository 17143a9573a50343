use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{RunRecord, Verdict};
use crate::domain::Task;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("asked for {requested} tasks but only {available} are available")]
pub struct SampleTooLarge {
    pub requested: usize,
    pub available: usize,
}

/// The first `n` tasks of a seeded shuffle.
pub fn sample_split(tasks: &[Task], seed: u64, n: usize) -> Result<Vec<Task>, SampleTooLarge> {
    if n > tasks.len() {
        return Err(SampleTooLarge {
            requested: n,
            available: tasks.len(),
        });
    }
    let mut order: Vec<usize> = (0..tasks.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(order[..n].iter().map(|&i| tasks[i].clone()).collect())
}

/// Tasks the screening records mark as failed, in task order.
pub fn build_residual(records: &[RunRecord], tasks: &[Task]) -> Vec<Task> {
    tasks
        .iter()
        .filter(|t| {
            records
                .iter()
                .any(|r| r.task_id == t.id && r.verdict == Verdict::Failure)
        })
        .cloned()
        .collect()
}
