use std::collections::HashMap;

use thiserror::Error;
use tracing::warn;

use crate::domain::{parse_action, Action, ActionParseError, Task};
use crate::engine::{Diagnostic, DiagnosticKind, EngineError, PlanResult};
use crate::protocol::{build_cot_prompt, AgentBackend, AgentRole, RoleUsage, SamplingParams};

/// Sampling temperature for self-consistency runs with more than one sample.
pub const COT_SAMPLING_TEMPERATURE: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanParseError {
    #[error("reply holds no api_call or finish line")]
    Empty,
    #[error(transparent)]
    Line(#[from] ActionParseError),
}

/// Parses a whole-plan reply: every `api_call(...)` line up to and including
/// the first `finish(...)`. Other lines are ignored; a malformed call line
/// rejects the reply.
pub fn parse_plan(text: &str) -> Result<Vec<Action>, PlanParseError> {
    let mut plan = Vec::new();
    for line in text.lines().map(str::trim) {
        let line = line
            .trim_start_matches(|c: char| c.is_ascii_digit() || matches!(c, '.' | ')' | '-' | '*' | ' '))
            .trim_matches('`');
        if !(line.starts_with("api_call(") || line.starts_with("finish(")) {
            continue;
        }
        let action = parse_action(line)?;
        let done = action.is_finish();
        plan.push(action);
        if done {
            break;
        }
    }
    if plan.is_empty() {
        Err(PlanParseError::Empty)
    } else {
        Ok(plan)
    }
}

/// Chain-of-thought baseline: `k` whole-plan samples, majority vote on the
/// canonical rendering, ties to the earliest sample. When no sample parses
/// the plan is empty.
///
/// `seed` is unused by the prompt itself and kept so every method has the
/// same signature; deterministic backends take their randomness elsewhere.
pub fn run_cot<B: AgentBackend + ?Sized>(task: &Task, backend: &B, k: u32, _seed: u64) -> Result<PlanResult, EngineError> {
    assert!(k >= 1, "run_cot needs at least one sample");
    let prompt = build_cot_prompt(task);
    let base = AgentRole::Planner.default_sampling();
    let sampling = if k > 1 { base.with_temperature(COT_SAMPLING_TEMPERATURE) } else { base };
    let mut usage = RoleUsage::default();
    let mut diagnostics = Vec::new();
    let mut samples: Vec<Vec<Action>> = Vec::new();
    for i in 0..k {
        let text = complete_with_retry(backend, &prompt, &sampling, &mut usage, &mut diagnostics, i)?;
        match parse_plan(&text) {
            Ok(plan) => samples.push(plan),
            Err(e) => diagnostics.push(Diagnostic {
                iter: i,
                role: AgentRole::Planner,
                kind: DiagnosticKind::PlannerUnparseable,
                detail: e.to_string(),
            }),
        }
    }
    if samples.is_empty() {
        warn!(task = %task.id, "all chain-of-thought samples were unparseable");
    }
    Ok(PlanResult {
        plan: majority(samples),
        iterations_used: k,
        usage,
        diagnostics,
        trace: Vec::new(),
        trace_path: None,
    })
}

fn complete_with_retry<B: AgentBackend + ?Sized>(
    backend: &B,
    prompt: &str,
    sampling: &SamplingParams,
    usage: &mut RoleUsage,
    diagnostics: &mut Vec<Diagnostic>,
    iter: u32,
) -> Result<String, EngineError> {
    let role = AgentRole::Planner;
    let mut attempt = 0;
    loop {
        match backend.complete(role, prompt, sampling) {
            Ok(c) => {
                usage.record(role, c.usage);
                return Ok(c.text);
            }
            Err(e) if attempt == 0 => diagnostics.push(Diagnostic {
                iter,
                role,
                kind: DiagnosticKind::BackendRetry,
                detail: e.to_string(),
            }),
            Err(source) => {
                return Err(EngineError::Backend {
                    role,
                    source,
                    diagnostics: std::mem::take(diagnostics),
                    usage: std::mem::take(usage),
                })
            }
        }
        attempt += 1;
    }
}

/// The most frequent plan by canonical rendering; ties go to the plan that
/// was sampled first.
pub fn majority(samples: Vec<Vec<Action>>) -> Vec<Action> {
    let key = |p: &[Action]| p.iter().map(Action::canonical).collect::<Vec<_>>().join("\n");
    let mut counts: HashMap<String, usize> = HashMap::new();
    for s in &samples {
        *counts.entry(key(s)).or_default() += 1;
    }
    let mut best: Option<(usize, Vec<Action>)> = None;
    for s in samples {
        let c = counts[&key(&s)];
        if best.as_ref().is_none_or(|(bc, _)| c > *bc) {
            best = Some((c, s));
        }
    }
    best.map(|(_, p)| p).unwrap_or_default()
}
