//! Prompt templates for the three roles, plus the persona-free planner and
//! the whole-plan chain-of-thought prompt used by the baseline.
//!
//! Templates live under `assets/prompts/` and are substituted in a single
//! pass, so user text containing `{placeholder}` tokens is never expanded a
//! second time.

use thiserror::Error;

use crate::domain::{Action, ParamSpec, ParamType, PlanState, Task, ToolSpec};

pub const PLANNER_TEMPLATE: &str = include_str!("../../assets/prompts/planner.txt");
pub const SIMULATOR_TEMPLATE: &str = include_str!("../../assets/prompts/simulator.txt");
pub const CRITIC_TEMPLATE: &str = include_str!("../../assets/prompts/critic.txt");
pub const MINIMAL_PLANNER_TEMPLATE: &str = include_str!("../../assets/prompts/planner_minimal.txt");
pub const COT_TEMPLATE: &str = include_str!("../../assets/prompts/cot.txt");

const REQUEST_HEADER: &str = "### User Request:";
const RULES_HEADER: &str = "### Rules:";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PromptError {
    #[error("finish(...) actions are never simulated")]
    RejectFinish,
    #[error("the critic needs a non-empty trajectory")]
    EmptyTrajectory,
    #[error("the plan is already terminal")]
    TerminalState,
}

/// Which template a prompt was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PromptKind {
    Planner,
    MinimalPlanner,
    Simulator,
    Critic,
    Cot,
}

impl PromptKind {
    pub fn detect(prompt: &str) -> Option<PromptKind> {
        if prompt.starts_with("You are a simulated API tool.") {
            Some(PromptKind::Simulator)
        } else if prompt.starts_with("As a Critic,") {
            Some(PromptKind::Critic)
        } else if prompt.starts_with("Output the next api_call or finish line") {
            Some(PromptKind::MinimalPlanner)
        } else if prompt.contains("Respond with ONLY the complete plan") {
            Some(PromptKind::Cot)
        } else if prompt.contains("Respond with ONLY the next line of code:") {
            Some(PromptKind::Planner)
        } else {
            None
        }
    }

    /// The user's request embedded in a prompt of this kind.
    pub fn request<'a>(self, prompt: &'a str) -> Option<&'a str> {
        let raw = match self {
            PromptKind::Planner | PromptKind::Cot => extract_section(prompt, REQUEST_HEADER, "\n\n###")?,
            PromptKind::MinimalPlanner => prompt.lines().nth(1)?,
            PromptKind::Simulator => {
                let s = extract_section(prompt, "### User's Goal:", "\n\n###")?;
                s.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(s)
            }
            PromptKind::Critic => prompt
                .lines()
                .find_map(|l| l.strip_prefix("User Request: "))?,
        };
        Some(raw.trim())
    }

    /// The rendered plan history (planner prompts) or trajectory (critic).
    pub fn history<'a>(self, prompt: &'a str) -> Option<&'a str> {
        match self {
            PromptKind::Planner => extract_section(prompt, "### Current Plan:", "\n\nRespond with ONLY"),
            PromptKind::MinimalPlanner => {
                let start = prompt.find("Plan so far:")? + "Plan so far:".len();
                Some(prompt[start..].trim())
            }
            PromptKind::Critic => extract_section(prompt, "### Current Plan Trajectory", "\n\n### Instruction"),
            PromptKind::Simulator | PromptKind::Cot => None,
        }
    }

    /// The tools block of a planner or chain-of-thought prompt.
    pub fn tools<'a>(self, prompt: &'a str) -> Option<&'a str> {
        match self {
            PromptKind::Planner | PromptKind::Cot => extract_section(prompt, "### Tools:", "\n\n###")
                .or_else(|| extract_section(prompt, "### Tools:", "\n\nRespond with ONLY")),
            PromptKind::MinimalPlanner => extract_section(prompt, "Tools:", "\n\nPlan so far:"),
            PromptKind::Simulator | PromptKind::Critic => None,
        }
    }

    /// The call being simulated.
    pub fn api_call<'a>(self, prompt: &'a str) -> Option<&'a str> {
        if self != PromptKind::Simulator {
            return None;
        }
        let s = extract_section(prompt, "### Tool Call to Simulate:", "\n\n###")?;
        Some(s.strip_prefix('`').and_then(|s| s.strip_suffix('`')).unwrap_or(s))
    }
}

/// Text between the line holding `header` and the first `end` after it,
/// trimmed. A missing `end` runs to the end of the prompt.
pub fn extract_section<'a>(prompt: &'a str, header: &str, end: &str) -> Option<&'a str> {
    let start = prompt.find(header)? + header.len();
    let body = &prompt[start..];
    let body = body.strip_prefix('\n').unwrap_or(body);
    let stop = body.find(end).unwrap_or(body.len());
    Some(body[..stop].trim())
}

fn substitute(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let name = &after[..close];
            vars.iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// One line per tool: `- name(param: type, opt?: type): description`.
pub fn tools_description(catalog: &[ToolSpec]) -> String {
    if catalog.is_empty() {
        return "(no tools available)".to_string();
    }
    catalog
        .iter()
        .map(|t| format!("- {}: {}", t.signature(), t.description))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Inverse of [`tools_description`]; lines that do not parse are skipped.
pub fn parse_tools_block(block: &str) -> Vec<ToolSpec> {
    block
        .lines()
        .filter_map(|line| {
            let line = line.trim().strip_prefix("- ")?;
            let open = line.find('(')?;
            let close = open + line[open..].find(')')?;
            let name = line[..open].trim();
            let description = line[close + 1..]
                .strip_prefix(':')
                .unwrap_or(&line[close + 1..])
                .trim();
            let mut tool = ToolSpec::new(name, description);
            for param in line[open + 1..close].split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (pname, ptype) = param.split_once(':')?;
                let ptype = ParamType::parse(ptype.trim())?;
                let pname = pname.trim();
                tool.params.push(match pname.strip_suffix('?') {
                    Some(opt) => ParamSpec::optional(opt, ptype),
                    None => ParamSpec::required(pname, ptype),
                });
            }
            Some(tool)
        })
        .collect()
}

/// Gold dependency hints for the `{graph_description}` slot. Only meant for
/// oracle debugging: during evaluation it would leak the answer.
pub fn dependency_hints(task: &Task) -> String {
    if task.gold_edges.is_empty() {
        return String::new();
    }
    let mut lines = vec!["### Dependencies:".to_string()];
    for &(from, to) in &task.gold_edges {
        lines.push(format!(
            "- step {} (`{}`) needs the output of step {} (`{}`)",
            to + 1,
            task.gold_plan[to].tool,
            from + 1,
            task.gold_plan[from].tool
        ));
    }
    lines.join("\n")
}

/// The planner prompt. The request is placed in its own section ahead of the
/// rules; the rest of the template is emitted unchanged.
pub fn build_planner_prompt(
    task: &Task,
    state: &PlanState,
    with_dependency_hints: bool,
) -> Result<String, PromptError> {
    if state.is_terminal() {
        return Err(PromptError::TerminalState);
    }
    let hints = if with_dependency_hints {
        dependency_hints(task)
    } else {
        String::new()
    };
    let tools = tools_description(&task.catalog);
    let history = state.render_history();
    let body = substitute(
        PLANNER_TEMPLATE,
        &[
            ("tools_description", &tools),
            ("graph_description", &hints),
            ("current_plan_history", &history),
        ],
    );
    let at = body.find(RULES_HEADER).expect("planner template has a rules section");
    Ok(format!(
        "{}{REQUEST_HEADER}\n{}\n\n{}",
        &body[..at],
        task.instruction.trim(),
        &body[at..]
    ))
}

/// Persona-free planner prompt used by the "no planner" ablation and by the
/// standard-MCTS baseline.
pub fn build_minimal_planner_prompt(task: &Task, state: &PlanState) -> Result<String, PromptError> {
    if state.is_terminal() {
        return Err(PromptError::TerminalState);
    }
    Ok(substitute(
        MINIMAL_PLANNER_TEMPLATE,
        &[
            ("user_request", task.instruction.trim()),
            ("tools_description", &tools_description(&task.catalog)),
            ("current_plan_history", &state.render_history()),
        ],
    ))
}

pub fn build_simulator_prompt(task: &Task, action: &Action) -> Result<String, PromptError> {
    if action.is_finish() {
        return Err(PromptError::RejectFinish);
    }
    Ok(substitute(
        SIMULATOR_TEMPLATE,
        &[
            ("user_request", task.instruction.trim()),
            ("api_call_str", &action.canonical()),
        ],
    ))
}

pub fn build_critic_prompt(task: &Task, state: &PlanState) -> Result<String, PromptError> {
    if state.is_empty() {
        return Err(PromptError::EmptyTrajectory);
    }
    Ok(substitute(
        CRITIC_TEMPLATE,
        &[
            ("user_request", task.instruction.trim()),
            ("trajectory", &state.render_history()),
        ],
    ))
}

/// Whole-plan prompt for the chain-of-thought baseline.
pub fn build_cot_prompt(task: &Task) -> String {
    substitute(
        COT_TEMPLATE,
        &[
            ("user_request", task.instruction.trim()),
            ("tools_description", &tools_description(&task.catalog)),
        ],
    )
}
