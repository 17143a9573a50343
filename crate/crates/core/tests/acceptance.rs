//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails if any
//! criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::Value;
use toolplan::backends::{OracleConfig, ScriptedOracle};
use toolplan::bench::{
    build_residual, compute_metrics, evaluate_plan, load_dataset, run_experiment, BackendSpec, ExperimentConfig,
    Method, RunRecord, Verdict, DEFAULT_SEEDS,
};
use toolplan::domain::{parse_action, Action, ActionParseError, Args, Complexity, PlanState};
use toolplan::engine::{run_search, search_with_tree};
use toolplan::protocol::{parse_critic, parse_observation, CriticParseError, ObservationParseError, UsageCounters};
use toolplan::search::{shape_reward, uct, AblationMode, NodeId, SearchConfig, SearchTree};

// Tolerances and thresholds.
const ARITH_TOL: f64 = 1e-12;
const METRICS_TOL: f64 = 1e-9;
const K50_TIME_LIMIT: Duration = Duration::from_secs(5);
const ARITH_SAMPLES: usize = 1_000;
const FUZZ_LINES: usize = 100;
const BRUTE_FORCE_TREES: u64 = 3_000;
const TRAP_PLANNER_ERROR: f64 = 0.3;
const MIN_SEED_WINS: usize = 4;

type Outcome = Result<String, String>;

fn datasets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../datasets")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("tree statistics", tree_statistics),
        ("uct and reward arithmetic", arithmetic),
        ("oracle convergence", oracle_convergence),
        ("ablation direction", ablation_direction),
        ("cascaded protocol", cascaded_protocol),
        ("metrics arithmetic", metrics_arithmetic),
        ("parser conformance", parser_conformance),
        ("brute-force extraction", brute_force_extraction),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let outcome = catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn tree_statistics() -> Outcome {
    let task = common::pipeline_task();
    let cfg = OracleConfig::perfect(17).with_planner_error(TRAP_PLANNER_ERROR);
    let oracle = ScriptedOracle::new([task.clone()], cfg).map_err(|e| e.to_string())?;
    let mut k50 = Duration::ZERO;
    let mut nodes = Vec::new();
    for k in [10u32, 25, 50] {
        for seed in DEFAULT_SEEDS {
            let config = SearchConfig { budget: k, ..Default::default() };
            let backend = oracle.fresh(seed);
            let start = Instant::now();
            let (_, tree) = search_with_tree(&task, &backend, &config, seed).map_err(|e| e.to_string())?;
            let elapsed = start.elapsed();
            if k == 50 {
                k50 = k50.max(elapsed);
            }
            let root = tree.node(tree.root());
            ensure(root.visits == u64::from(k), || format!("K={k} seed {seed}: root visits {}", root.visits))?;
            for n in tree.nodes() {
                let sum: u64 = tree.children(n.id).map(|c| c.visits).sum();
                ensure(n.visits >= sum, || format!("K={k} node {}: {} < {sum}", n.id, n.visits))?;
            }
            nodes.push(tree.len());
        }
    }
    ensure(k50 < K50_TIME_LIMIT, || format!("K=50 took {k50:?}"))?;
    Ok(format!(
        "15 runs, tree sizes {}..{}, slowest K=50 run {:?}",
        nodes.iter().min().unwrap(),
        nodes.iter().max().unwrap(),
        k50
    ))
}

fn arithmetic() -> Outcome {
    // Independent forms: the square root taken in log space, the blend as a lerp.
    let uct_ref = |v: f64, c: u64, p: u64, e: f64| {
        v / c as f64 + e * (0.5 * ((p as f64).ln().ln() - (c as f64).ln())).exp()
    };
    let shape_ref = |base: f64, rho: f64, a: f64| rho + a * (base - rho);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for i in 0..ARITH_SAMPLES {
        let c = rng.random_range(1..=500u64);
        let p = c + rng.random_range(0..=500u64);
        let v = rng.random_range(0.0..=1.0) * c as f64;
        let e = [0.0, 1.0, 1.5, 2.0][i % 4] * rng.random_range(0.5..=1.5);
        let got = uct(v, c, p, e);
        let want = uct_ref(v, c, p, e);
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= ARITH_TOL, || format!("uct({v}, {c}, {p}, {e}) = {got}, want {want}"))?;

        let base = [0.0, 0.5, 1.0][i % 3];
        let rho = rng.random_range(0.0..=1.0);
        let alpha = match i % 4 {
            0 => 0.0,
            1 => 0.5,
            2 => 1.0,
            _ => rng.random_range(0.0..=1.0),
        };
        let got = shape_reward(base, rho, alpha).map_err(|e| e.to_string())?;
        let want = shape_ref(base, rho, alpha);
        worst = worst.max((got - want).abs());
        ensure((got - want).abs() <= ARITH_TOL, || format!("shape({base}, {rho}, {alpha}) = {got}, want {want}"))?;
        let collapse = match alpha {
            a if a == 0.0 => Some(rho),
            a if a == 1.0 => Some(base),
            _ => None,
        };
        if let Some(expect) = collapse {
            ensure((got - expect).abs() <= ARITH_TOL, || format!("alpha={alpha} does not collapse"))?;
        }
    }
    ensure(uct(3.0, 0, 10, 1.5) == f64::INFINITY, || "unvisited child is not +inf".into())?;
    Ok(format!("{ARITH_SAMPLES} samples each, max deviation {worst:e}"))
}

fn oracle_convergence() -> Outcome {
    let config = SearchConfig::default();
    ensure(
        config.budget == 50 && config.exploration == 1.5 && config.alpha == 0.5,
        || "defaults are not K=50, C=1.5, alpha=0.5".into(),
    )?;
    let mut summary = Vec::new();
    for name in ["daily_life", "ml_pipeline"] {
        let dataset = load_dataset(datasets().join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        let lens: Vec<usize> = dataset.tasks.iter().map(|t| t.gold_plan.len()).collect();
        ensure(dataset.tasks.len() >= 20, || format!("{name}: only {} tasks", dataset.tasks.len()))?;
        ensure(
            lens.iter().min() == Some(&1) && lens.iter().max() == Some(&8),
            || format!("{name}: gold lengths {lens:?}"),
        )?;
        let oracle = ScriptedOracle::new(dataset.tasks.iter().cloned(), OracleConfig::perfect(0)).map_err(|e| e.to_string())?;
        for seed in DEFAULT_SEEDS {
            for task in &dataset.tasks {
                let result = run_search(task, &oracle.fresh(seed), &config, seed).map_err(|e| e.to_string())?;
                ensure(result.plan == task.gold_actions(), || {
                    format!("{name}/{} seed {seed}: extracted {:?}", task.id, result.plan)
                })?;
                ensure(evaluate_plan(&result.plan, task).is_success(), || format!("{name}/{} not a success", task.id))?;
            }
        }
        summary.push(format!("{name} {}/{} x 5 seeds", dataset.tasks.len(), dataset.tasks.len()));
    }
    Ok(summary.join(", "))
}

fn per_seed_accuracy(rows: &[toolplan::bench::MetricsRow], method: Method) -> Result<BTreeMap<u64, f64>, String> {
    let row = rows
        .iter()
        .find(|r| r.method == method)
        .ok_or_else(|| format!("no metrics row for {method}"))?;
    Ok(row.report.per_seed.iter().map(|(s, m)| (*s, m.overall_acc)).collect())
}

fn ablation_direction() -> Outcome {
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut config = ExperimentConfig::new(datasets().join("trap_suite.json"));
    config.backend = BackendSpec::Scripted(OracleConfig::perfect(0).with_planner_error(TRAP_PLANNER_ERROR));
    config.methods = vec![
        Method::Spiral,
        Method::Ablation(AblationMode::UniformRewards),
        Method::Ablation(AblationMode::NoSimulator),
        Method::Mcts(50),
    ];
    config.workers = 4;
    config.out = out.path().to_path_buf();
    let report = run_experiment(&config).map_err(|e| e.to_string())?;
    let tasks = report.records.iter().filter(|r| r.seed == DEFAULT_SEEDS[0] && r.method == Method::Spiral).count();
    ensure(tasks == 30, || format!("trap suite has {tasks} tasks"))?;
    let full = per_seed_accuracy(&report.rows, Method::Spiral)?;
    let full_mean = full.values().sum::<f64>() / full.len() as f64;
    let mut parts = vec![format!("full {full_mean:.1}%")];
    let mut problems = Vec::new();
    for rival in &config.methods[1..] {
        let acc = per_seed_accuracy(&report.rows, *rival)?;
        let mean = acc.values().sum::<f64>() / acc.len() as f64;
        let wins = full.iter().filter(|(s, f)| **f > acc[s]).count();
        parts.push(format!("{rival} {mean:.1}% ({wins}/5 seeds)"));
        if !(full_mean > mean && wins >= MIN_SEED_WINS) {
            problems.push(rival.to_string());
        }
    }
    let detail = parts.join(", ");
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; direction fails for {problems:?}"))
    }
}

fn cascaded_protocol() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dataset = load_dataset(datasets().join("trap_suite.json")).map_err(|e| e.to_string())?;
    let backend = BackendSpec::Scripted(OracleConfig::perfect(5).with_planner_error(TRAP_PLANNER_ERROR));

    // Residual from a seeded CoT(k=1) run equals its failures.
    let mut cot = ExperimentConfig::new(datasets().join("trap_suite.json"));
    cot.backend = backend.clone();
    cot.methods = vec![Method::Cot(1)];
    cot.out = dir.path().join("cot");
    let report = run_experiment(&cot).map_err(|e| e.to_string())?;
    let mut residual_sizes = Vec::new();
    for seed in &cot.seeds {
        let records: Vec<RunRecord> = report.records.iter().filter(|r| r.seed == *seed).cloned().collect();
        let mut failed: Vec<&str> = records
            .iter()
            .filter(|r| r.verdict == Verdict::Failure)
            .map(|r| r.task_id.as_str())
            .collect();
        let residual = build_residual(&records, &dataset.tasks);
        let mut ids: Vec<&str> = residual.iter().map(|t| t.id.as_str()).collect();
        failed.sort_unstable();
        ids.sort_unstable();
        ensure(ids == failed, || format!("seed {seed}: residual {ids:?} != failures {failed:?}"))?;
        residual_sizes.push(ids.len());
    }

    // The full cascaded run is byte-identical across reruns and worker counts.
    let mut full = cot.clone();
    full.methods = vec![Method::Spiral, Method::Cot(3), Method::Mcts(50)];
    full.residual = true;
    let mut files = Vec::new();
    for (i, workers) in [1usize, 4, 4].into_iter().enumerate() {
        full.workers = workers;
        full.out = dir.path().join(format!("full{i}"));
        run_experiment(&full).map_err(|e| e.to_string())?;
        files.push(std::fs::read(full.out.join("records.jsonl")).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], || "records.jsonl differs between 1 and 4 workers".into())?;
    ensure(files[1] == files[2], || "records.jsonl differs between identical runs".into())?;
    let lines = files[0].iter().filter(|b| **b == b'\n').count();
    Ok(format!("residual sizes {residual_sizes:?}; {lines} records identical at 1 and 4 workers"))
}

fn record(seed: u64, complexity: Complexity, success: bool, tokens: u64, calls: u64) -> RunRecord {
    RunRecord {
        task_id: format!("t{seed}-{tokens}"),
        method: Method::Spiral,
        seed,
        budget: None,
        alpha: None,
        predicted_plan: Vec::new(),
        verdict: if success { Verdict::Success } else { Verdict::Failure },
        complexity,
        usage: UsageCounters { prompt_tokens: tokens - tokens / 4, completion_tokens: tokens / 4, calls },
        diagnostics: Vec::new(),
        error: None,
        trace_path: None,
        wall_time: 0.0,
    }
}

fn metrics_arithmetic() -> Outcome {
    use Complexity::{Complex, Simple};
    // Seed 1: simple 2/2, complex 1/3. Seed 2: simple 1/2, complex 0/3.
    let records = vec![
        record(1, Simple, true, 2_000, 4),
        record(1, Simple, true, 2_400, 4),
        record(1, Complex, true, 6_000, 10),
        record(1, Complex, false, 5_600, 12),
        record(1, Complex, false, 4_000, 10),
        record(2, Simple, true, 1_600, 2),
        record(2, Simple, false, 2_400, 6),
        record(2, Complex, false, 8_000, 14),
        record(2, Complex, false, 4_000, 8),
        record(2, Complex, false, 4_000, 10),
    ];
    let m = compute_metrics(&records).map_err(|e| e.to_string())?;
    let close = |name: &str, got: f64, want: f64| {
        ensure((got - want).abs() <= METRICS_TOL, || format!("{name} = {got}, want {want}"))
    };
    // Hand-computed: 4 successes, 40,000 tokens, 80 calls.
    close("simple_acc", m.pooled.simple_acc, 75.0)?;
    close("complex_acc", m.pooled.complex_acc, 100.0 / 6.0)?;
    close("overall_acc", m.pooled.overall_acc, 40.0)?;
    close("token_efficiency", m.pooled.token_efficiency, 100.0)?;
    close("call_efficiency", m.pooled.call_efficiency, 5.0)?;
    close("mean_tokens", m.pooled.mean_tokens, 4_000.0)?;
    // Seed 1: 3/5 over 20,000 tokens; seed 2: 1/5 over 20,000 tokens.
    close("seed 1 overall", m.per_seed[&1].overall_acc, 60.0)?;
    close("seed 2 overall", m.per_seed[&2].overall_acc, 20.0)?;
    close("seed 1 token_efficiency", m.per_seed[&1].token_efficiency, 150.0)?;
    close("overall mean", m.across_seeds.overall_acc.mean, 40.0)?;
    close("overall std", m.across_seeds.overall_acc.std, 20.0)?;
    // Success rate per 10,000 tokens, with tokens measured per task, is the
    // same quantity.
    let per_10k = m.pooled.overall_acc / (m.pooled.mean_tokens / 10_000.0);
    close("rate per 10k tokens", m.pooled.token_efficiency, per_10k)?;
    // One success over 20,000 tokens.
    let single = compute_metrics(&[record(9, Simple, true, 20_000, 1)]).map_err(|e| e.to_string())?;
    close("single-success efficiency", single.pooled.token_efficiency, 50.0)?;
    Ok("10-record fixture and per-10k-token definition agree".into())
}

#[derive(Deserialize)]
struct Fixtures {
    actions: Vec<ActionCase>,
    observations: Vec<ObservationCase>,
    critics: Vec<CriticCase>,
}

#[derive(Deserialize)]
struct ActionCase {
    line: String,
    tool: Option<String>,
    args: Option<Args>,
    finish: Option<String>,
    error: Option<String>,
}

#[derive(Deserialize)]
struct ObservationCase {
    line: String,
    value: Option<String>,
    error: Option<String>,
}

#[derive(Deserialize)]
struct CriticCase {
    line: String,
    score: Option<f64>,
    justification: Option<String>,
    error: Option<String>,
}

fn parser_conformance() -> Outcome {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/parser_cases.json");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let fx: Fixtures = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    for case in &fx.actions {
        let got = parse_action(&case.line);
        let ok = match (&case.error, &got) {
            (Some(kind), Err(ActionParseError::Malformed { .. })) => kind == "malformed",
            (Some(kind), Err(ActionParseError::UnknownForm { .. })) => kind == "unknown_form",
            (None, Ok(Action::Finish { reason })) => case.finish.as_deref() == Some(reason.as_str()),
            (None, Ok(Action::ApiCall { tool, args })) => {
                case.tool.as_deref() == Some(tool.as_str()) && case.args.as_ref() == Some(args)
            }
            _ => false,
        };
        ensure(ok, || format!("action {:?} -> {got:?}", case.line))?;
    }
    for case in &fx.observations {
        let got = parse_observation(&case.line);
        let ok = match (&case.error, &got) {
            (Some(kind), Err(ObservationParseError::MissingMarker(_))) => kind == "missing_marker",
            (Some(kind), Err(ObservationParseError::EmptyValue(_))) => kind == "empty_value",
            (None, Ok(o)) => case.value.as_deref() == Some(o.value()),
            _ => false,
        };
        ensure(ok, || format!("observation {:?} -> {got:?}", case.line))?;
    }
    for case in &fx.critics {
        let got = parse_critic(&case.line);
        let ok = match (&case.error, &got) {
            (Some(kind), Err(CriticParseError::MissingScore(_))) => kind == "missing_score",
            (None, Ok(v)) => {
                case.score.is_some_and(|s| (s - v.score).abs() < 1e-12)
                    && case.justification.as_deref() == Some(v.justification.as_str())
                    && !v.fallback
            }
            _ => false,
        };
        ensure(ok, || format!("critic {:?} -> {got:?}", case.line))?;
    }

    let valid: Vec<&str> = fx.actions.iter().filter(|c| c.error.is_none() && c.tool.is_some()).map(|c| c.line.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let word = |rng: &mut ChaCha8Rng| -> String {
        (0..rng.random_range(1..8)).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
    };
    for i in 0..FUZZ_LINES {
        let base = valid[rng.random_range(0..valid.len())];
        let call = base.split("  //").next().unwrap_or(base).trim_end();
        let line = match i % 5 {
            // cut before the closing parenthesis
            0 => {
                let mut cut = rng.random_range("api_call(".len() + 1..call.len() - 1);
                while !call.is_char_boundary(cut) {
                    cut -= 1;
                }
                call[..cut].to_string()
            }
            // junk after the call
            1 => format!("{call} {}", word(&mut rng)),
            // argument map replaced by another bracket
            2 => call.replacen('{', ["[", "<", "(", "'"][rng.random_range(0..4)], 1),
            // tool name left unterminated
            3 => format!("api_call(\"{}, {{}})", word(&mut rng)),
            // plain text
            _ => format!("{} {} {}", word(&mut rng), word(&mut rng), word(&mut rng)),
        };
        let result = catch_unwind(AssertUnwindSafe(|| {
            (parse_action(&line).is_err(), parse_observation(&line).is_err(), parse_critic(&line).is_err())
        }));
        match result {
            Ok((true, true, true)) => {}
            Ok(r) => return Err(format!("fuzzed line {line:?} was accepted: {r:?}")),
            Err(_) => return Err(format!("fuzzed line {line:?} panicked")),
        }
    }
    Ok(format!(
        "{} actions, {} observations, {} critic lines; {FUZZ_LINES} fuzzed lines rejected",
        fx.actions.len(),
        fx.observations.len(),
        fx.critics.len()
    ))
}

/// A random tree with depth at most 3 and at most 3 children per node.
/// Values are drawn from a small grid so ties in mean and visits occur.
fn random_tree(seed: u64) -> SearchTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = SearchTree::new(PlanState::new(), 10, 3);
    let mut frontier = vec![tree.root()];
    while let Some(id) = frontier.pop() {
        let depth = tree.node(id).depth;
        if depth >= 3 || (id != tree.root() && tree.node(id).terminal) {
            continue;
        }
        for i in 0..rng.random_range(0..=3) {
            let action = Action::call(format!("t{}_{i}", id.0), Args::new());
            let state = tree.node(id).state.clone();
            let child = tree.add_child(id, action, state);
            let visits = rng.random_range(0..=3u64);
            let node = tree.node_mut(child);
            node.visits = visits;
            node.value = visits as f64 * f64::from(rng.random_range(0..=4u8)) / 4.0;
            node.terminal = rng.random_bool(0.2);
            frontier.push(child);
        }
    }
    tree
}

/// Enumerates every root-to-node path and keeps the ones on which each step
/// is the best visited sibling and which cannot be extended.
fn exhaustive_best_path(tree: &SearchTree) -> Vec<NodeId> {
    let key = |id: NodeId| {
        let n = tree.node(id);
        (n.value / n.visits as f64, n.visits, std::cmp::Reverse(id.0))
    };
    let best_child = |id: NodeId| -> Option<NodeId> {
        let mut visited: Vec<NodeId> = tree.children(id).filter(|c| c.visits > 0).map(|c| c.id).collect();
        visited.sort_by(|a, b| key(*a).partial_cmp(&key(*b)).unwrap());
        visited.last().copied()
    };
    let mut paths = vec![vec![tree.root()]];
    let mut i = 0;
    while i < paths.len() {
        let last = *paths[i].last().unwrap();
        for c in tree.node(last).children.clone() {
            let mut p = paths[i].clone();
            p.push(c);
            paths.push(p);
        }
        i += 1;
    }
    let mut winners: Vec<Vec<NodeId>> = paths
        .into_iter()
        .filter(|p| p.windows(2).all(|w| best_child(w[0]) == Some(w[1])))
        .filter(|p| {
            let last = *p.last().unwrap();
            (p.len() > 1 && tree.node(last).terminal) || best_child(last).is_none()
        })
        .collect();
    assert_eq!(winners.len(), 1, "exactly one greedy path");
    winners.pop().unwrap()
}

fn brute_force_extraction() -> Outcome {
    let mut mismatches = 0;
    let mut sizes = 0;
    for seed in 0..BRUTE_FORCE_TREES {
        let tree = random_tree(seed);
        sizes += tree.len();
        let path = exhaustive_best_path(&tree);
        let expected: Vec<Action> = path.iter().skip(1).map(|id| tree.node(*id).incoming_action.clone().unwrap()).collect();
        if tree.extract_best_plan() != expected || tree.best_leaf() != *path.last().unwrap() {
            mismatches += 1;
        }
    }
    ensure(mismatches == 0, || format!("{mismatches} mismatches"))?;
    Ok(format!(
        "{BRUTE_FORCE_TREES} trees, mean size {:.1}, 0 mismatches",
        sizes as f64 / BRUTE_FORCE_TREES as f64
    ))
}

#[test]
#[ignore = "needs a live endpoint: set TOOLPLAN_ENDPOINT, TOOLPLAN_MODEL and TOOLPLAN_API_KEY"]
fn live_http_smoke() {
    use toolplan::backends::{HttpBackend, HttpBackendConfig};
    let endpoint = std::env::var("TOOLPLAN_ENDPOINT").expect("TOOLPLAN_ENDPOINT");
    let model = std::env::var("TOOLPLAN_MODEL").expect("TOOLPLAN_MODEL");
    let backend = HttpBackend::new(HttpBackendConfig {
        endpoint,
        model,
        api_key_env: Some("TOOLPLAN_API_KEY".into()),
        ..Default::default()
    });
    let task = common::bank_task();
    let config = SearchConfig { budget: 5, ..Default::default() };
    let result = run_search(&task, &backend, &config, 42).expect("search completes");
    let value: Value = serde_json::to_value(&result.usage).unwrap();
    println!("plan: {:?}\nusage: {value}", result.plan);
    assert!(result.usage.total().calls > 0);
}
