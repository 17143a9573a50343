//! The search loop.
//!
//! Every iteration selects a node by UCT, asks the planner for one action,
//! grounds it with the simulator, scores the new trajectory with the critic
//! and backpropagates the shaped reward. [`run_standard_mcts`] swaps the
//! simulate-and-reflect step for a random rollout, and [`run_ablation`]
//! dispatches the ablation variants.

mod agents;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::domain::{Action, Args, Observation, ParamType, PlanState, Task, TaskError, ToolSpec};
use crate::protocol::{
    build_critic_prompt, build_minimal_planner_prompt, build_planner_prompt,
    build_simulator_prompt, AgentBackend, AgentRole, BackendError, RoleUsage,
};
use crate::search::{AblationMode, ConfigError, NodeId, SearchConfig, SearchTree, TraceEvent, TraceEventKind};

pub use agents::{Diagnostic, DiagnosticKind};
use agents::Agents;

/// Observation used when the simulator is disabled.
pub const PLACEHOLDER_OBSERVATION: &str = "\"ok\"";
/// Observation used when the simulator's reply could not be parsed.
pub const UNPARSED_OBSERVATION: &str = "<unparsed>";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid task: {0}")]
    Task(#[from] TaskError),
    #[error("{role} call failed after retry: {source}")]
    Backend {
        role: AgentRole,
        source: BackendError,
        diagnostics: Vec<Diagnostic>,
        usage: RoleUsage,
    },
}

/// Outcome of one search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub plan: Vec<Action>,
    pub iterations_used: u32,
    pub usage: RoleUsage,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip)]
    pub trace: Vec<TraceEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<PathBuf>,
}

/// Runs the full planner/simulator/critic search (or one of its non-rollout
/// ablations) for `config.budget` iterations.
pub fn run_search<B: AgentBackend + ?Sized>(
    task: &Task,
    backend: &B,
    config: &SearchConfig,
    seed: u64,
) -> Result<PlanResult, EngineError> {
    search_with_tree(task, backend, config, seed).map(|(r, _)| r)
}

/// Classical MCTS baseline: same selection and expansion, but each new node
/// is valued by a seeded random rollout scored with the validity heuristic.
/// Neither the simulator nor the critic is consulted.
pub fn run_standard_mcts<B: AgentBackend + ?Sized>(
    task: &Task,
    backend: &B,
    config: &SearchConfig,
    seed: u64,
) -> Result<PlanResult, EngineError> {
    standard_with_tree(task, backend, config, seed).map(|(r, _)| r)
}

/// Dispatches on the configured ablation mode.
pub fn run_ablation<B: AgentBackend + ?Sized>(
    task: &Task,
    backend: &B,
    config: &SearchConfig,
    seed: u64,
) -> Result<PlanResult, EngineError> {
    match config.validate()? {
        AblationMode::StandardMcts => run_standard_mcts(task, backend, config, seed),
        _ => run_search(task, backend, config, seed),
    }
}

/// [`run_search`], also returning the final tree.
pub fn search_with_tree<B: AgentBackend + ?Sized>(
    task: &Task,
    backend: &B,
    config: &SearchConfig,
    seed: u64,
) -> Result<(PlanResult, SearchTree), EngineError> {
    if config.validate()? == AblationMode::StandardMcts {
        return Err(ConfigError::Invalid("standard rollouts run through run_standard_mcts".into()).into());
    }
    task.validate()?;
    Search::new(task, backend, config, seed).run()
}

/// [`run_standard_mcts`], also returning the final tree.
pub fn standard_with_tree<B: AgentBackend + ?Sized>(
    task: &Task,
    backend: &B,
    config: &SearchConfig,
    seed: u64,
) -> Result<(PlanResult, SearchTree), EngineError> {
    if config.validate()? != AblationMode::StandardMcts {
        return Err(ConfigError::Invalid("run_standard_mcts needs the standard-mcts mode".into()).into());
    }
    task.validate()?;
    Search::new(task, backend, config, seed).run()
}

struct Search<'a, B: ?Sized> {
    task: &'a Task,
    config: &'a SearchConfig,
    agents: Agents<'a, B>,
    tree: SearchTree,
    trace: Vec<TraceEvent>,
    rng: ChaCha8Rng,
}

/// What the evaluation step produced for a freshly created child.
struct Scored {
    r_base: Option<f64>,
    rho_ref: Option<f64>,
    reward: f64,
    rollout: Option<Vec<String>>,
}

impl<'a, B: AgentBackend + ?Sized> Search<'a, B> {
    fn new(task: &'a Task, backend: &'a B, config: &'a SearchConfig, seed: u64) -> Self {
        Self {
            task,
            config,
            agents: Agents::new(backend),
            tree: SearchTree::new(PlanState::new(), config.max_depth, config.expansion_width),
            trace: Vec::with_capacity(config.budget as usize),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn run(mut self) -> Result<(PlanResult, SearchTree), EngineError> {
        for iter in 0..self.config.budget {
            self.agents.begin_iteration(iter);
            let event = self.iterate(iter)?;
            self.tree.backpropagate(event.backprop_node, event.reward);
            self.trace.push(event);
        }
        let plan = self.tree.extract_best_plan();
        let (usage, diagnostics) = self.agents.finish();
        let result = PlanResult {
            plan,
            iterations_used: self.config.budget,
            usage,
            diagnostics,
            trace: self.trace,
            trace_path: None,
        };
        Ok((result, self.tree))
    }

    fn iterate(&mut self, iter: u32) -> Result<TraceEvent, EngineError> {
        let leaf = self.tree.select_leaf(self.config.exploration);
        let mut event = TraceEvent {
            iter,
            selected_node: leaf,
            backprop_node: leaf,
            event: TraceEventKind::Terminal,
            action: None,
            r_base: None,
            rho_ref: None,
            reward: self.config.r_terminal,
            calls: 0,
            rollout: None,
        };
        let node = self.tree.node(leaf);
        if node.terminal {
            // a finished plan keeps its own reward; depth-limited paths are dead ends
            if node.ends_in_finish() {
                event.reward = node.reward.unwrap_or(self.config.r_terminal);
            }
            return Ok(event);
        }

        let state = node.state.clone();
        let prompt = if self.config.modes.use_planner_persona {
            build_planner_prompt(self.task, &state, self.config.dependency_hints)
        } else {
            build_minimal_planner_prompt(self.task, &state)
        }
        .expect("non-terminal nodes hold non-terminal states");
        let Some(action) = self.agents.propose(&prompt)? else {
            self.tree.note_expansion_attempt(leaf);
            event.event = TraceEventKind::PlannerFailure;
            event.calls = self.agents.iteration_calls();
            return Ok(event);
        };
        let canonical = action.canonical();
        event.action = Some(canonical.clone());

        if let Some(existing) = self.tree.find_child(leaf, &canonical) {
            self.tree.note_expansion_attempt(leaf);
            let n = self.tree.node(existing);
            event.event = TraceEventKind::Duplicate;
            event.backprop_node = existing;
            event.reward = n.reward.unwrap_or(self.config.r_terminal);
            event.calls = self.agents.iteration_calls();
            return Ok(event);
        }

        let observation = if action.is_finish() {
            None
        } else if self.config.modes.use_simulator {
            let prompt = build_simulator_prompt(self.task, &action).expect("api calls are simulated");
            Some(self.agents.simulate(&prompt)?)
        } else {
            Some(Observation::new(PLACEHOLDER_OBSERVATION).expect("single line"))
        };
        let child_state = state
            .append_step(action.clone(), observation)
            .expect("observation pairing follows the action kind");
        let child = self.tree.add_child(leaf, action.clone(), child_state);

        let scored = if self.config.modes.standard_rollout {
            self.rollout(child, &action)
        } else {
            self.reflect(child, &action)?
        };
        self.tree.node_mut(child).reward = Some(scored.reward);
        event.event = TraceEventKind::Expand;
        event.backprop_node = child;
        event.r_base = scored.r_base;
        event.rho_ref = scored.rho_ref;
        event.reward = scored.reward;
        event.rollout = scored.rollout;
        event.calls = self.agents.iteration_calls();
        Ok(event)
    }

    fn reflect(&mut self, child: NodeId, action: &Action) -> Result<Scored, EngineError> {
        let modes = self.config.modes;
        let r_base = self.config.rubric.score(action, &self.task.catalog);
        let rho_ref = if modes.use_critic {
            let prompt = build_critic_prompt(self.task, &self.tree.node(child).state)
                .expect("children hold at least one step");
            self.agents.critique(&prompt)?.score
        } else {
            SearchConfig::NEUTRAL_CRITIC_SCORE
        };
        let reward = if modes.uniform_rewards {
            SearchConfig::UNIFORM_REWARD
        } else {
            self.config.alpha * r_base + (1.0 - self.config.alpha) * rho_ref
        };
        Ok(Scored {
            r_base: Some(r_base),
            rho_ref: Some(rho_ref),
            reward,
            rollout: None,
        })
    }

    fn rollout(&mut self, child: NodeId, action: &Action) -> Scored {
        let catalog = &self.task.catalog;
        let mut depth = self.tree.node(child).depth;
        let mut last = action.clone();
        let mut steps = Vec::new();
        while !last.is_finish() && depth < self.config.max_depth {
            let pick = self.rng.random_range(0..=catalog.len());
            last = match catalog.get(pick) {
                Some(tool) => random_valid_call(tool),
                None => Action::finish("rollout"),
            };
            steps.push(last.canonical());
            depth += 1;
        }
        let reward = self.config.rubric.score(&last, catalog);
        Scored {
            r_base: Some(reward),
            rho_ref: None,
            reward,
            rollout: Some(steps),
        }
    }
}

/// A call to `tool` with every required parameter filled by a type-correct
/// placeholder.
fn random_valid_call(tool: &ToolSpec) -> Action {
    let mut args = Args::new();
    for p in tool.params.iter().filter(|p| p.required) {
        let v = match p.param_type {
            ParamType::String => Value::String("value".into()),
            ParamType::Number => Value::from(0),
            ParamType::Boolean => Value::Bool(false),
            ParamType::Object => Value::Object(Args::new()),
        };
        args.insert(p.name.clone(), v);
    }
    Action::call(tool.name.clone(), args)
}
