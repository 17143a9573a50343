use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use toolplan::backends::{HttpBackendConfig, OracleConfig};
use toolplan::bench::{run_experiment, BackendSpec, ExperimentConfig, Method};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "toolplan", version, about = "Tree-search tool-use planner and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write records, metrics and traces.
    Run(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendKind {
    Scripted,
    Http,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON experiment configuration. Flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    /// spiral, cot:N, mcts:N or ablation:<flag>. Repeat or comma-separate.
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// Chat-completions URL for the http backend.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Planner error rate of the scripted backend.
    #[arg(long)]
    planner_error: Option<f64>,
    /// Iteration budget K. Several values run a sweep.
    #[arg(long, value_delimiter = ',')]
    budget: Vec<u32>,
    /// Reward weight. Several values run a sweep.
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    #[arg(long)]
    c_explore: Option<f64>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Tasks sampled per seed.
    #[arg(long)]
    sample_size: Option<usize>,
    /// Screen with CoT(k=1) and evaluate only the failures.
    #[arg(long)]
    residual: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Write one search trace per run.
    #[arg(long)]
    trace: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, &self.dataset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(dataset)) => ExperimentConfig::new(dataset),
            (None, None) => bail!("either --config or --dataset is required"),
        };
        if let (Some(_), Some(dataset)) = (&self.config, self.dataset) {
            config.dataset = dataset;
        }
        if !self.seeds.is_empty() {
            config.seeds = self.seeds;
        }
        if !self.methods.is_empty() {
            config.methods = self.methods;
        }
        match (self.backend, &mut config.backend) {
            (Some(BackendKind::Http), BackendSpec::Scripted(_)) => {
                config.backend = BackendSpec::Http(HttpBackendConfig::default());
            }
            (Some(BackendKind::Scripted), BackendSpec::Http(_)) => {
                config.backend = BackendSpec::Scripted(OracleConfig::default());
            }
            _ => {}
        }
        match &mut config.backend {
            BackendSpec::Http(h) => {
                if let Some(e) = self.endpoint {
                    h.endpoint = e;
                }
                if let Some(m) = self.model {
                    h.model = m;
                }
                if self.planner_error.is_some() {
                    bail!("--planner-error only applies to the scripted backend");
                }
            }
            BackendSpec::Scripted(o) => {
                if self.endpoint.is_some() || self.model.is_some() {
                    bail!("--endpoint and --model only apply to the http backend");
                }
                if let Some(rate) = self.planner_error {
                    o.planner_error_rate = rate;
                }
            }
        }
        match self.budget.as_slice() {
            [] => {}
            [k] => {
                config.search.budget = *k;
                config.sweep.budget.clear();
            }
            many => config.sweep.budget = many.to_vec(),
        }
        match self.alpha.as_slice() {
            [] => {}
            [a] => {
                config.search.alpha = *a;
                config.sweep.alpha.clear();
            }
            many => config.sweep.alpha = many.to_vec(),
        }
        if let Some(c) = self.c_explore {
            config.search.exploration = c;
        }
        if let Some(d) = self.max_depth {
            config.search.max_depth = d;
        }
        if let Some(n) = self.sample_size {
            config.sample_size = Some(n);
        }
        config.residual |= self.residual;
        config.trace |= self.trace;
        if let Some(out) = self.out {
            config.out = out;
        }
        if let Some(w) = self.workers {
            config.workers = w;
        }
        config.validate()?;
        Ok(config)
    }
}

fn run(args: RunArgs) -> Result<()> {
    let config = args.into_config()?;
    let report = run_experiment(&config).with_context(|| format!("experiment on {}", config.dataset.display()))?;
    println!(
        "{:<28} {:>6} {:>6} {:>8} {:>8} {:>10} {:>8} {:>8} {:>9}",
        "method", "K", "alpha", "simple", "complex", "overall", "tokens", "calls", "tok_eff"
    );
    for row in &report.rows {
        let p = &row.report.pooled;
        let s = &row.report.across_seeds;
        println!(
            "{:<28} {:>6} {:>6} {:>8.1} {:>8.1} {:>5.1}±{:<4.1} {:>8.0} {:>8.1} {:>9.2}",
            row.method.to_string(),
            row.budget.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
            row.alpha.map(|a| a.to_string()).unwrap_or_else(|| "-".into()),
            p.simple_acc,
            p.complex_acc,
            p.overall_acc,
            s.overall_acc.std,
            p.mean_tokens,
            p.mean_calls,
            p.token_efficiency,
        );
    }
    if !report.screening.is_empty() {
        let passed = report.screening.iter().filter(|r| r.verdict.is_success()).count();
        println!("screening: {passed}/{} solved by cot_1", report.screening.len());
    }
    println!("wrote {}", report.out.display());
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
