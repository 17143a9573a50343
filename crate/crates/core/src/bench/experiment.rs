use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::info;

use super::{
    build_residual, compute_metrics, evaluate_plan_with, load_dataset, run_cot, sample_split, DatasetError,
    MatchPolicy, Method, MetricsError, MetricsReport, RunRecord, SampleTooLarge, Verdict,
};
use crate::backends::{HttpBackend, HttpBackendConfig, OracleConfig, OracleError, ScriptedOracle};
use crate::domain::Task;
use crate::engine::{run_ablation, run_standard_mcts, EngineError, PlanResult};
use crate::protocol::AgentBackend;
use crate::search::{write_trace, AblationMode, ConfigError, SearchConfig};

/// Seeds used when a configuration names none.
pub const DEFAULT_SEEDS: [u64; 5] = [42, 101, 1234, 2024, 12345];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendSpec {
    Scripted(OracleConfig),
    Http(HttpBackendConfig),
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Scripted(OracleConfig::default())
    }
}

/// Values swept over for the search methods. Empty lists fall back to the
/// single value in the search configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    pub budget: Vec<u32>,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub backend: BackendSpec,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default)]
    pub sweep: Sweep,
    /// Tasks drawn per seed; all tasks when absent.
    #[serde(default)]
    pub sample_size: Option<usize>,
    /// Screen every sampled task with CoT(k=1) first and evaluate the
    /// methods only on the failures.
    #[serde(default)]
    pub residual: bool,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Write one search trace per run under `traces/`.
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub policy: MatchPolicy,
}

fn default_seeds() -> Vec<u64> {
    DEFAULT_SEEDS.to_vec()
}

fn default_methods() -> Vec<Method> {
    vec![Method::Spiral]
}

fn default_workers() -> usize {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("runs/latest")
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<PathBuf>) -> Self {
        Self {
            dataset: dataset.into(),
            seeds: default_seeds(),
            methods: default_methods(),
            backend: BackendSpec::default(),
            search: SearchConfig::default(),
            sweep: Sweep::default(),
            sample_size: None,
            residual: false,
            workers: default_workers(),
            out: default_out(),
            trace: false,
            policy: MatchPolicy::default(),
        }
    }

    /// Reads a JSON configuration. A relative dataset path is taken relative
    /// to the configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| ExperimentError::Config {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if config.dataset.is_relative() {
            if let Some(dir) = path.parent() {
                config.dataset = dir.join(&config.dataset);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let invalid = |m: &str| Err(ExperimentError::Invalid(ConfigError::Invalid(m.into())));
        if self.seeds.is_empty() {
            return invalid("at least one seed is required");
        }
        if self.methods.is_empty() {
            return invalid("at least one method is required");
        }
        if self.workers == 0 {
            return invalid("workers must be at least 1");
        }
        for point in self.sweep_points() {
            self.search_config(Method::Spiral, point).validate()?;
        }
        if let BackendSpec::Scripted(o) = &self.backend {
            o.validate()?;
        }
        Ok(())
    }

    fn sweep_points(&self) -> Vec<(u32, f64)> {
        let budgets = if self.sweep.budget.is_empty() { vec![self.search.budget] } else { self.sweep.budget.clone() };
        let alphas = if self.sweep.alpha.is_empty() { vec![self.search.alpha] } else { self.sweep.alpha.clone() };
        budgets
            .iter()
            .flat_map(|&b| alphas.iter().map(move |&a| (b, a)))
            .collect()
    }

    fn search_config(&self, method: Method, (budget, alpha): (u32, f64)) -> SearchConfig {
        let base = SearchConfig { budget, alpha, ..self.search.clone() };
        match method {
            Method::Spiral => base.with_mode(AblationMode::Full),
            Method::Ablation(mode) => base.with_mode(mode),
            Method::Mcts(n) => SearchConfig { budget: n, ..base.with_mode(AblationMode::StandardMcts) },
            Method::Cot(_) => base,
        }
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{path}:{line}:{column}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Sample(#[from] SampleTooLarge),
    #[error(transparent)]
    Invalid(#[from] ConfigError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Aggregate for one method at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub report: MetricsReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<RunRecord>,
    /// CoT(k=1) screening records when the residual protocol is on.
    pub screening: Vec<RunRecord>,
    pub rows: Vec<MetricsRow>,
    pub out: PathBuf,
}

enum RunBackend {
    Scripted(ScriptedOracle),
    Http(HttpBackend),
}

impl RunBackend {
    /// Runs `f` against the backend for one run. Scripted runs each get an
    /// oracle of their own, seeded from the run seed, so results do not
    /// depend on scheduling.
    fn with<R>(&self, seed: u64, f: impl FnOnce(&dyn AgentBackend) -> R) -> R {
        match self {
            RunBackend::Scripted(o) => {
                let mixed = o.config().rng_seed ^ seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
                f(&o.fresh(mixed))
            }
            RunBackend::Http(h) => f(h),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Job {
    seed: u64,
    task: usize,
    method: Method,
    point: Option<(u32, f64)>,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    backend: &'a RunBackend,
    traces: Option<PathBuf>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let dataset = load_dataset(&config.dataset)?;
    let backend = match &config.backend {
        BackendSpec::Scripted(o) => RunBackend::Scripted(ScriptedOracle::new(dataset.tasks.iter().cloned(), *o)?),
        BackendSpec::Http(h) => RunBackend::Http(HttpBackend::new(h.clone())),
    };
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    fs::create_dir_all(&config.out).map_err(io_err(&config.out))?;
    let traces = config.trace.then(|| config.out.join("traces"));
    if let Some(dir) = &traces {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    let ctx = Context {
        config,
        backend: &backend,
        traces,
    };

    let n = config.sample_size.unwrap_or(dataset.tasks.len());
    let mut per_seed: Vec<Vec<Task>> = config
        .seeds
        .iter()
        .map(|&s| sample_split(&dataset.tasks, s, n))
        .collect::<Result<_, _>>()?;

    let mut screening = Vec::new();
    if config.residual {
        let jobs: Vec<Job> = config
            .seeds
            .iter()
            .enumerate()
            .flat_map(|(si, &seed)| {
                (0..per_seed[si].len()).map(move |task| Job { seed, task, method: Method::Cot(1), point: None })
            })
            .collect();
        screening = pool.install(|| run_jobs(&ctx, &config.seeds, &per_seed, &jobs, false));
        for (si, &seed) in config.seeds.iter().enumerate() {
            let records: Vec<RunRecord> = screening.iter().filter(|r| r.seed == seed).cloned().collect();
            per_seed[si] = build_residual(&records, &per_seed[si]);
        }
    }

    let mut jobs = Vec::new();
    for (si, &seed) in config.seeds.iter().enumerate() {
        for &method in &config.methods {
            let points: Vec<Option<(u32, f64)>> = if method.is_swept() {
                config.sweep_points().into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            for point in points {
                for task in 0..per_seed[si].len() {
                    jobs.push(Job { seed, task, method, point });
                }
            }
        }
    }
    info!(jobs = jobs.len(), workers = config.workers, "running experiment");
    let records = pool.install(|| run_jobs(&ctx, &config.seeds, &per_seed, &jobs, true));

    let rows = aggregate(config, &records)?;
    write_outputs(config, &records, &screening, &rows)?;
    Ok(ExperimentReport {
        records,
        screening,
        rows,
        out: config.out.clone(),
    })
}

fn run_jobs(ctx: &Context, seeds: &[u64], per_seed: &[Vec<Task>], jobs: &[Job], main: bool) -> Vec<RunRecord> {
    jobs.par_iter()
        .map(|job| {
            let si = seeds.iter().position(|&s| s == job.seed).expect("job seed is configured");
            run_job(ctx, job, &per_seed[si][job.task], main)
        })
        .collect()
}

fn run_job(ctx: &Context, job: &Job, task: &Task, main: bool) -> RunRecord {
    let start = Instant::now();
    let point = job.point.unwrap_or((ctx.config.search.budget, ctx.config.search.alpha));
    let search = ctx.config.search_config(job.method, point);
    let outcome: Result<PlanResult, EngineError> = ctx.backend.with(job.seed, |backend| match job.method {
        Method::Spiral | Method::Ablation(_) => run_ablation(task, backend, &search, job.seed),
        Method::Mcts(_) => run_standard_mcts(task, backend, &search, job.seed),
        Method::Cot(k) => run_cot(task, backend, k, job.seed),
    });
    let (budget, alpha) = match job.method {
        Method::Spiral | Method::Ablation(_) => (Some(point.0), Some(point.1)),
        Method::Mcts(n) => (Some(n), None),
        Method::Cot(_) => (None, None),
    };
    let mut record = RunRecord {
        task_id: task.id.clone(),
        method: job.method,
        seed: job.seed,
        budget,
        alpha,
        predicted_plan: Vec::new(),
        verdict: Verdict::Failure,
        complexity: task.complexity(),
        usage: Default::default(),
        diagnostics: Vec::new(),
        error: None,
        trace_path: None,
        wall_time: 0.0,
    };
    match outcome {
        Ok(result) => {
            record.verdict = evaluate_plan_with(ctx.config.policy, &result.plan, task);
            record.usage = result.usage.total();
            record.diagnostics = result.diagnostics;
            record.predicted_plan = result.plan;
            if let (true, Some(dir), false) = (main, &ctx.traces, result.trace.is_empty()) {
                let name = trace_name(&record);
                let path = dir.join(&name);
                match write_trace(&path, &result.trace) {
                    Ok(()) => record.trace_path = Some(format!("traces/{name}")),
                    Err(e) => record.error = Some(format!("cannot write trace: {e}")),
                }
            }
        }
        Err(e) => {
            if let EngineError::Backend { usage, diagnostics, .. } = &e {
                record.usage = usage.total();
                record.diagnostics = diagnostics.clone();
            }
            record.error = Some(e.to_string());
        }
    }
    record.wall_time = start.elapsed().as_secs_f64();
    record
}

fn trace_name(r: &RunRecord) -> String {
    let mut name = format!("{}_{}", r.seed, r.method);
    if let Some(b) = r.budget {
        name.push_str(&format!("_k{b}"));
    }
    if let Some(a) = r.alpha {
        name.push_str(&format!("_a{a}"));
    }
    let id: String = r
        .task_id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect();
    format!("{name}_{id}.jsonl")
}

fn aggregate(config: &ExperimentConfig, records: &[RunRecord]) -> Result<Vec<MetricsRow>, ExperimentError> {
    let mut keys: Vec<(Method, Option<u32>, Option<f64>)> = Vec::new();
    for r in records {
        let key = (r.method, r.budget, r.alpha);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut rows = Vec::with_capacity(keys.len());
    for (method, budget, alpha) in keys {
        let group: Vec<RunRecord> = records
            .iter()
            .filter(|r| r.method == method && r.budget == budget && r.alpha == alpha)
            .cloned()
            .collect();
        rows.push(MetricsRow {
            method,
            budget,
            alpha,
            report: compute_metrics(&group)?,
        });
    }
    if rows.is_empty() && !config.residual {
        return Err(MetricsError::EmptyRecords.into());
    }
    Ok(rows)
}

fn write_outputs(
    config: &ExperimentConfig,
    records: &[RunRecord],
    screening: &[RunRecord],
    rows: &[MetricsRow],
) -> Result<(), ExperimentError> {
    let write = |name: &str, bytes: Vec<u8>| {
        let path = config.out.join(name);
        fs::write(&path, bytes).map_err(|source| ExperimentError::Io { path, source })
    };
    write("records.jsonl", jsonl(records))?;
    if config.residual {
        write("screening.jsonl", jsonl(screening))?;
    }
    let timings: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            serde_json::json!({
                "task_id": r.task_id, "method": r.method, "seed": r.seed,
                "budget": r.budget, "alpha": r.alpha, "wall_time": r.wall_time,
            })
        })
        .collect();
    write("timings.jsonl", jsonl(&timings))?;
    let mut metrics = serde_json::to_vec_pretty(&serde_json::json!({ "rows": rows })).expect("metrics serialize");
    metrics.push(b'\n');
    write("metrics.json", metrics)
}

fn jsonl<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item).expect("records serialize");
        out.write_all(b"\n").expect("writing to a Vec cannot fail");
    }
    out
}
