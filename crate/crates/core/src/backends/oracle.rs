//! A deterministic stand-in for a language model that knows the gold plans.
//!
//! The oracle only sees prompt text. It recovers the request, the tools and
//! the plan so far from the prompt, looks the request up in its task table
//! and answers from the gold plan, with configurable mistakes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::domain::{
    args_equivalent, normalize_value, parse_action, Action, Args, ParamType, Task, ToolSpec,
    EMPTY_PLAN, OBSERVATION_PREFIX,
};
use crate::protocol::{
    estimate_tokens, parse_tools_block, AgentBackend, AgentRole, BackendError, Completion,
    PromptKind, SamplingParams, UsageCounters,
};

/// Reason string of every finish line the oracle writes.
pub const ORACLE_FINISH_REASON: &str = "All tasks completed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Chance that a planner proposal (or a whole-plan step) is a decoy.
    pub planner_error_rate: f64,
    /// Chance that a simulated observation is perturbed.
    pub simulator_noise_rate: f64,
    /// Weight of gold alignment in the critic score; the rest is noise.
    pub critic_fidelity: f64,
    pub rng_seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self::perfect(0)
    }
}

impl OracleConfig {
    /// No planner mistakes, no observation noise, exact critic.
    pub fn perfect(rng_seed: u64) -> Self {
        Self {
            planner_error_rate: 0.0,
            simulator_noise_rate: 0.0,
            critic_fidelity: 1.0,
            rng_seed,
        }
    }

    pub fn with_planner_error(mut self, rate: f64) -> Self {
        self.planner_error_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        for (field, value) in [
            ("planner_error_rate", self.planner_error_rate),
            ("simulator_noise_rate", self.simulator_noise_rate),
            ("critic_fidelity", self.critic_fidelity),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(OracleError::OutOfRange { field, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("two tasks share the request {0:?}")]
    DuplicateRequest(String),
}

/// Scripted backend answering all three roles, plus whole-plan prompts.
///
/// Randomness for a call comes from hashing the seed, the role, the prompt
/// and how many times that exact prompt was seen before. Replies therefore
/// depend only on the sequence of prompts, never on thread interleaving
/// across different tasks. Use [`ScriptedOracle::fresh`] to get an oracle
/// with clean counters for each independent run.
#[derive(Debug)]
pub struct ScriptedOracle {
    config: OracleConfig,
    tasks: Arc<HashMap<String, Task>>,
    seen: Mutex<HashMap<[u8; 32], u64>>,
}

impl ScriptedOracle {
    pub fn new(tasks: impl IntoIterator<Item = Task>, config: OracleConfig) -> Result<Self, OracleError> {
        config.validate()?;
        let mut table = HashMap::new();
        for task in tasks {
            let key = task.instruction.trim().to_string();
            match table.get(&key) {
                Some(existing) if existing != &task => return Err(OracleError::DuplicateRequest(key)),
                _ => {
                    table.insert(key, task);
                }
            }
        }
        Ok(Self {
            config,
            tasks: Arc::new(table),
            seen: Mutex::new(HashMap::new()),
        })
    }

    pub fn config(&self) -> &OracleConfig {
        &self.config
    }

    /// Same tasks and error rates, a new seed and no call history.
    pub fn fresh(&self, rng_seed: u64) -> Self {
        Self {
            config: OracleConfig { rng_seed, ..self.config },
            tasks: Arc::clone(&self.tasks),
            seen: Mutex::new(HashMap::new()),
        }
    }

    fn call_rng(&self, role: AgentRole, prompt: &str) -> ChaCha8Rng {
        let key: [u8; 32] = Sha256::new()
            .chain_update(role.as_str())
            .chain_update([0])
            .chain_update(prompt)
            .finalize()
            .into();
        let occurrence = {
            let mut seen = self.seen.lock().expect("oracle counter lock");
            let n = seen.entry(key).or_insert(0);
            *n += 1;
            *n - 1
        };
        let seed: [u8; 32] = Sha256::new()
            .chain_update(self.config.rng_seed.to_le_bytes())
            .chain_update(key)
            .chain_update(occurrence.to_le_bytes())
            .finalize()
            .into();
        ChaCha8Rng::from_seed(seed)
    }

    fn task_for(&self, kind: PromptKind, prompt: &str) -> Option<&Task> {
        self.tasks.get(kind.request(prompt)?)
    }

    /// The reply text for `prompt`, without usage accounting.
    pub fn reply(&self, role: AgentRole, prompt: &str) -> String {
        let mut rng = self.call_rng(role, prompt);
        let kind = PromptKind::detect(prompt);
        let task = kind.and_then(|k| self.task_for(k, prompt));
        match (kind, task) {
            (Some(k @ (PromptKind::Planner | PromptKind::MinimalPlanner)), Some(task)) => {
                let tools = k.tools(prompt).map(parse_tools_block).unwrap_or_default();
                let history = parse_history(k.history(prompt).unwrap_or(EMPTY_PLAN));
                self.plan_next(task, &tools, &history, &mut rng).canonical()
            }
            (Some(PromptKind::Cot), Some(task)) => {
                let tools = PromptKind::Cot.tools(prompt).map(parse_tools_block).unwrap_or_default();
                self.whole_plan(task, &tools, &mut rng)
            }
            (Some(PromptKind::Simulator), Some(task)) => {
                let call = PromptKind::Simulator
                    .api_call(prompt)
                    .and_then(|c| parse_action(c).ok());
                self.simulate(task, call.as_ref(), &mut rng)
            }
            (Some(PromptKind::Critic), Some(task)) => {
                let history = parse_history(PromptKind::Critic.history(prompt).unwrap_or(EMPTY_PLAN));
                self.critique(task, &history, &mut rng)
            }
            _ => match role {
                AgentRole::Planner => Action::finish("unknown request").canonical(),
                AgentRole::Simulator => format!("{OBSERVATION_PREFIX}\"unknown\""),
                AgentRole::Critic => "Score: 0.0 | Justification: unknown request".to_string(),
            },
        }
    }

    fn plan_next(&self, task: &Task, tools: &[ToolSpec], history: &[HistoryStep], rng: &mut ChaCha8Rng) -> Action {
        let outputs = follow_gold(task, history);
        let done = outputs.iter().take_while(|o| o.is_some()).count();
        let proposal = if done == task.gold_plan.len() {
            Action::finish(ORACLE_FINISH_REASON)
        } else {
            expected_action(task, done, &outputs)
        };
        if rng.random::<f64>() < self.config.planner_error_rate {
            decoy(task, tools, &proposal, rng)
        } else {
            proposal
        }
    }

    fn whole_plan(&self, task: &Task, tools: &[ToolSpec], rng: &mut ChaCha8Rng) -> String {
        let mut lines = Vec::with_capacity(task.gold_plan.len() + 1);
        for (i, step) in task.gold_plan.iter().enumerate() {
            let mut args = step.args.clone();
            for (_, v) in args.iter_mut() {
                if let Some(j) = task.consumed_output(i, v) {
                    *v = Value::String(format!("<output of step {}>", j + 1));
                }
            }
            let action = Action::call(step.tool.clone(), args);
            let action = if rng.random::<f64>() < self.config.planner_error_rate {
                decoy(task, tools, &action, rng)
            } else {
                action
            };
            lines.push(action.canonical());
        }
        lines.push(Action::finish(ORACLE_FINISH_REASON).canonical());
        lines.join("\n")
    }

    fn simulate(&self, task: &Task, call: Option<&Action>, rng: &mut ChaCha8Rng) -> String {
        let output = match call {
            Some(Action::ApiCall { tool, args }) => {
                let hit = (0..task.gold_plan.len()).find(|&i| {
                    let gold = &task.gold_plan[i];
                    gold.tool == *tool && independent_args_match(task, i, args)
                });
                match hit {
                    Some(i) => task.gold_output(i),
                    None if task.tool(tool).is_some() => format!("{}_output", tool.to_lowercase()),
                    None => "error: unknown tool".to_string(),
                }
            }
            _ => "error: unreadable call".to_string(),
        };
        let output = if rng.random::<f64>() < self.config.simulator_noise_rate {
            format!("{output}_unverified")
        } else {
            output
        };
        let quoted = serde_json::to_string(&output).expect("strings serialize");
        format!("{OBSERVATION_PREFIX}{quoted}")
    }

    fn critique(&self, task: &Task, history: &[HistoryStep], rng: &mut ChaCha8Rng) -> String {
        let fraction = gold_prefix_fraction(task, history);
        let noise: f64 = rng.random();
        let f = self.config.critic_fidelity;
        let score = f * fraction + (1.0 - f) * noise;
        format!("Score: {score} | Justification: {:.0}% of the reference plan is in place", fraction * 100.0)
    }
}

impl AgentBackend for ScriptedOracle {
    fn complete(&self, role: AgentRole, prompt: &str, _sampling: &SamplingParams) -> Result<Completion, BackendError> {
        let text = self.reply(role, prompt);
        let usage = UsageCounters::single_call(estimate_tokens(prompt), estimate_tokens(&text));
        Ok(Completion { text, usage })
    }
}

/// One step recovered from a rendered history.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct HistoryStep {
    pub action: Action,
    /// Observation value with one layer of quotes removed.
    pub observation: Option<String>,
}

pub(crate) fn parse_history(text: &str) -> Vec<HistoryStep> {
    let mut steps: Vec<HistoryStep> = Vec::new();
    for line in text.lines().map(str::trim) {
        if let Some(value) = line.strip_prefix(OBSERVATION_PREFIX) {
            if let Some(last) = steps.last_mut() {
                let obs = crate::domain::Observation::new(value).ok();
                last.observation = obs.map(|o| o.unquoted().to_string());
            }
        } else if let Ok(action) = parse_action(line) {
            steps.push(HistoryStep { action, observation: None });
        }
    }
    steps
}

/// Walks the history and matches gold steps in order, skipping anything that
/// does not fit. Entry `j` holds the observation recorded for gold step `j`
/// once it has been matched.
fn follow_gold(task: &Task, history: &[HistoryStep]) -> Vec<Option<String>> {
    let mut outputs: Vec<Option<String>> = vec![None; task.gold_plan.len()];
    let mut next = 0;
    for step in history {
        if next == task.gold_plan.len() {
            break;
        }
        if step.action == expected_action(task, next, &outputs) {
            outputs[next] = Some(step.observation.clone().unwrap_or_default());
            next += 1;
        }
    }
    outputs
}

/// Gold step `i` with every consumed output replaced by what was actually
/// observed for the producing step.
fn expected_action(task: &Task, i: usize, outputs: &[Option<String>]) -> Action {
    let step = &task.gold_plan[i];
    let mut args = step.args.clone();
    for (_, v) in args.iter_mut() {
        if let Some(j) = task.consumed_output(i, v) {
            if let Some(observed) = &outputs[j] {
                *v = Value::String(observed.clone());
            }
        }
    }
    Action::call(step.tool.clone(), args)
}

/// Arguments agree with gold step `i` on everything that is not a consumed
/// output.
fn independent_args_match(task: &Task, i: usize, args: &Args) -> bool {
    let gold = &task.gold_plan[i].args;
    let keep = |a: &Args| -> Args {
        a.iter()
            .filter(|(k, _)| {
                gold.get(*k)
                    .map(|g| task.consumed_output(i, g).is_none())
                    .unwrap_or(true)
            })
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    };
    args.len() == gold.len() && args_equivalent(&keep(args), &keep(gold))
}

/// Length of the literal gold prefix of the trajectory's calls, over the
/// larger of the gold length and the number of calls made.
pub(crate) fn gold_prefix_fraction(task: &Task, history: &[HistoryStep]) -> f64 {
    let calls: Vec<&Action> = history.iter().map(|s| &s.action).filter(|a| !a.is_finish()).collect();
    let prefix = calls
        .iter()
        .zip(&task.gold_plan)
        .take_while(|(a, g)| a.tool() == Some(g.tool.as_str()) && args_equivalent(a.args().unwrap(), &g.args))
        .count();
    let denom = task.gold_plan.len().max(calls.len());
    if denom == 0 {
        1.0
    } else {
        prefix as f64 / denom as f64
    }
}

/// A plausible wrong action in place of `intended`: a tool from outside the
/// gold plan when the catalog has one, otherwise a wrong-parameter variant,
/// a premature finish, or a superfluous repeat.
fn decoy(task: &Task, tools: &[ToolSpec], intended: &Action, rng: &mut ChaCha8Rng) -> Action {
    let off_plan: Vec<&ToolSpec> = tools
        .iter()
        .filter(|t| !task.gold_plan.iter().any(|g| g.tool == t.name))
        .collect();
    if !off_plan.is_empty() {
        let tool = off_plan[rng.random_range(0..off_plan.len())];
        return fill_call(tool, intended.args());
    }
    match intended {
        Action::ApiCall { tool, args } if !args.is_empty() => {
            let keys: Vec<&String> = args.keys().collect();
            let key = keys[rng.random_range(0..keys.len())].clone();
            let mut args = args.clone();
            let wrong = perturb(&args[&key]);
            args.insert(key, wrong);
            Action::call(tool.clone(), args)
        }
        Action::ApiCall { .. } => Action::finish(ORACLE_FINISH_REASON),
        Action::Finish { .. } => match task.gold_plan.last() {
            Some(last) => last.to_action(),
            None => intended.clone(),
        },
    }
}

/// A call to `tool` with its required parameters filled, reusing values from
/// `hint` where the names and types line up.
fn fill_call(tool: &ToolSpec, hint: Option<&Args>) -> Action {
    let mut args = Args::new();
    for p in tool.params.iter().filter(|p| p.required) {
        let reused = hint.and_then(|h| h.get(&p.name)).filter(|v| p.param_type.accepts(v));
        let value = match (reused, p.param_type) {
            (Some(v), _) => v.clone(),
            (None, ParamType::String) => Value::String(format!("{}_input", p.name)),
            (None, ParamType::Number) => Value::from(1),
            (None, ParamType::Boolean) => Value::Bool(true),
            (None, ParamType::Object) => Value::Object(Args::new()),
        };
        args.insert(p.name.clone(), value);
    }
    Action::call(tool.name.clone(), args)
}

/// A near miss of `value`: a multi-word string loses its leading words, a
/// single word is replaced, numbers shift, booleans flip.
fn perturb(value: &Value) -> Value {
    match value {
        Value::String(s) => {
            let words: Vec<&str> = s.split_whitespace().collect();
            match words.as_slice() {
                [.., last] if words.len() > 1 => Value::String((*last).to_string()),
                _ => Value::String(format!("{}_default", normalize_value(value))),
            }
        }
        Value::Number(n) => match n.as_i64() {
            Some(i) => Value::from(i.wrapping_add(1)),
            None => Value::from(n.as_f64().unwrap_or(0.0) * 2.0 + 1.0),
        },
        Value::Bool(b) => Value::Bool(!b),
        _ => Value::String("default".into()),
    }
}
