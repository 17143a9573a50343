//! Benchmark harness: datasets, seeded sampling, the chain-of-thought
//! baseline, plan evaluation, metrics and the experiment runner.

mod cot;
mod dataset;
mod evaluate;
mod experiment;
mod metrics;
mod record;
mod split;

pub use cot::{majority, parse_plan, run_cot, PlanParseError, COT_SAMPLING_TEMPERATURE};
pub use dataset::{load_dataset, parse_dataset, save_dataset, Dataset, DatasetError, DatasetFile, SchemaError, TaskRecord};
pub use evaluate::{evaluate_plan, evaluate_plan_with, step_reference, MatchPolicy, Verdict};
pub use experiment::{
    run_experiment, BackendSpec, ExperimentConfig, ExperimentError, ExperimentReport, MetricsRow, Sweep,
    DEFAULT_SEEDS,
};
pub use metrics::{compute_metrics, MeanStd, MetricsError, MetricsReport, SeedSpread, Summary};
pub use record::{Method, RunRecord};
pub use split::{build_residual, sample_split, SampleTooLarge};
