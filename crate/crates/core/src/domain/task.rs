use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Action, Args, ToolSpec};

/// One step of a reference plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldStep {
    pub tool: String,
    #[serde(default)]
    pub args: Args,
    /// What the tool returns in the reference execution. Downstream steps
    /// that consume this step quote it verbatim in their arguments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl GoldStep {
    pub fn new(tool: impl Into<String>, args: Args) -> Self {
        Self {
            tool: tool.into(),
            args,
            output: None,
        }
    }

    pub fn with_output(mut self, output: impl Into<String>) -> Self {
        self.output = Some(output.into());
        self
    }

    pub fn to_action(&self) -> Action {
        Action::call(self.tool.clone(), self.args.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Complexity {
    Simple,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("task id is empty")]
    EmptyId,
    #[error("tool name is empty")]
    EmptyToolName,
    #[error("duplicate tool `{0}` in catalog")]
    DuplicateTool(String),
    #[error("tool `{tool}` declares parameter `{param}` twice")]
    DuplicateParam { tool: String, param: String },
    #[error("gold step {step} uses unknown tool `{tool}`")]
    UnknownTool { step: usize, tool: String },
    #[error("gold step {step} is not a valid action literal: {reason}")]
    BadArgs { step: usize, reason: String },
    #[error("dependency edge ({from}, {to}) is out of range for {len} gold steps")]
    EdgeOutOfRange { from: usize, to: usize, len: usize },
    #[error("dependency edges contain a cycle")]
    Cycle,
}

/// One benchmark problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub instruction: String,
    pub catalog: Vec<ToolSpec>,
    pub gold_plan: Vec<GoldStep>,
    #[serde(default)]
    pub gold_edges: Vec<(usize, usize)>,
}

impl Task {
    pub fn complexity(&self) -> Complexity {
        if self.gold_plan.len() == 1 {
            Complexity::Simple
        } else {
            Complexity::Complex
        }
    }

    pub fn tool(&self, name: &str) -> Option<&ToolSpec> {
        self.catalog.iter().find(|t| t.name == name)
    }

    /// Output of gold step `index`, falling back to a name derived from the
    /// tool when the dataset does not pin one.
    pub fn gold_output(&self, index: usize) -> String {
        let step = &self.gold_plan[index];
        step.output
            .clone()
            .unwrap_or_else(|| format!("{}_result_{}", slug(&step.tool), index + 1))
    }

    /// The earlier gold step whose output `value` quotes, if any. This is how
    /// a step's dependence on a previous result shows up in its arguments.
    pub fn consumed_output(&self, step: usize, value: &serde_json::Value) -> Option<usize> {
        let v = value.as_str()?.trim();
        (0..step.min(self.gold_plan.len())).rev().find(|&j| self.gold_output(j) == v)
    }

    /// The gold plan as actions, terminated by `finish(...)`.
    pub fn gold_actions(&self) -> Vec<Action> {
        self.gold_plan
            .iter()
            .map(GoldStep::to_action)
            .chain(std::iter::once(Action::finish("All tasks completed")))
            .collect()
    }

    pub fn validate(&self) -> Result<(), TaskError> {
        if self.id.trim().is_empty() {
            return Err(TaskError::EmptyId);
        }
        validate_catalog(&self.catalog)?;
        for (i, step) in self.gold_plan.iter().enumerate() {
            if self.tool(&step.tool).is_none() {
                return Err(TaskError::UnknownTool {
                    step: i,
                    tool: step.tool.clone(),
                });
            }
            if !step.to_action().is_representable() {
                return Err(TaskError::BadArgs {
                    step: i,
                    reason: "arguments outside the literal subset".into(),
                });
            }
        }
        let n = self.gold_plan.len();
        for &(from, to) in &self.gold_edges {
            if from >= n || to >= n {
                return Err(TaskError::EdgeOutOfRange { from, to, len: n });
            }
        }
        if !is_acyclic(n, &self.gold_edges) {
            return Err(TaskError::Cycle);
        }
        Ok(())
    }
}

pub(crate) fn validate_catalog(catalog: &[ToolSpec]) -> Result<(), TaskError> {
    let mut names = HashSet::new();
    for tool in catalog {
        if tool.name.trim().is_empty() {
            return Err(TaskError::EmptyToolName);
        }
        if !names.insert(tool.name.as_str()) {
            return Err(TaskError::DuplicateTool(tool.name.clone()));
        }
        let mut params = HashSet::new();
        for p in &tool.params {
            if !params.insert(p.name.as_str()) {
                return Err(TaskError::DuplicateParam {
                    tool: tool.name.clone(),
                    param: p.name.clone(),
                });
            }
        }
    }
    Ok(())
}

fn is_acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for &(a, b) in edges {
        out[a].push(b);
        indegree[b] += 1;
    }
    let mut ready: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut seen = 0;
    while let Some(i) = ready.pop() {
        seen += 1;
        for &j in &out[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    seen == n
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}
