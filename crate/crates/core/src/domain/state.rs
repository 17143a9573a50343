use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Action;

/// Rendering of a plan with no steps.
pub const EMPTY_PLAN: &str = "(empty plan)";

/// Prefix of every observation line in a rendered history.
pub(crate) const OBSERVATION_PREFIX: &str = "Observation: tool_output = ";

/// A simulated tool output. Always a single line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Observation(String);

impl Observation {
    pub fn new(value: impl Into<String>) -> Result<Self, StateError> {
        let value = value.into();
        if value.contains(['\n', '\r']) {
            return Err(StateError::MultilineObservation(value));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> &str {
        &self.0
    }

    /// The value with one pair of surrounding quotes removed, which is what a
    /// planner is expected to copy into a downstream argument.
    pub fn unquoted(&self) -> &str {
        let v = self.0.trim();
        for q in ['"', '\''] {
            if v.len() >= 2 && v.starts_with(q) && v.ends_with(q) {
                return &v[1..v.len() - 1];
            }
        }
        v
    }
}

impl TryFrom<String> for Observation {
    type Error = StateError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Observation::new(value)
    }
}

impl From<Observation> for String {
    fn from(o: Observation) -> Self {
        o.0
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("plan already ends in finish(...)")]
    AlreadyTerminal,
    #[error("api_call steps need an observation")]
    MissingObservation,
    #[error("finish(...) steps carry no observation")]
    UnexpectedObservation,
    #[error("observation must be a single line: {0:?}")]
    MultilineObservation(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub action: Action,
    pub observation: Option<Observation>,
}

/// The action–observation chain accumulated along one search path.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlanState {
    steps: Vec<Step>,
}

impl PlanState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_terminal(&self) -> bool {
        self.steps.last().is_some_and(|s| s.action.is_finish())
    }

    pub fn actions(&self) -> impl Iterator<Item = &Action> {
        self.steps.iter().map(|s| &s.action)
    }

    /// Returns a new state with one more step; `self` is left untouched.
    pub fn append_step(
        &self,
        action: Action,
        observation: Option<Observation>,
    ) -> Result<PlanState, StateError> {
        if self.is_terminal() {
            return Err(StateError::AlreadyTerminal);
        }
        match (&action, &observation) {
            (Action::ApiCall { .. }, None) => return Err(StateError::MissingObservation),
            (Action::Finish { .. }, Some(_)) => return Err(StateError::UnexpectedObservation),
            _ => {}
        }
        let mut steps = Vec::with_capacity(self.steps.len() + 1);
        steps.extend_from_slice(&self.steps);
        steps.push(Step {
            action,
            observation,
        });
        Ok(PlanState { steps })
    }

    /// Text form used for the planner's `{current_plan_history}` and the
    /// critic's `{trajectory}`.
    pub fn render_history(&self) -> String {
        if self.steps.is_empty() {
            return EMPTY_PLAN.to_string();
        }
        let mut lines = Vec::with_capacity(self.steps.len() * 2);
        for step in &self.steps {
            lines.push(step.action.canonical());
            if let Some(obs) = &step.observation {
                lines.push(format!("{OBSERVATION_PREFIX}{obs}"));
            }
        }
        lines.join("\n")
    }
}
