use serde::{Deserialize, Serialize};
use tracing::warn;

use super::{EngineError, UNPARSED_OBSERVATION};
use crate::domain::{parse_action, Action, Observation};
use crate::protocol::{
    parse_critic, parse_observation, AgentBackend, AgentRole, CriticVerdict, RoleUsage,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// A backend call failed and was retried.
    BackendRetry,
    /// A reply could not be parsed and the call was retried.
    ParseRetry,
    /// The planner gave no parseable action after its retry.
    PlannerUnparseable,
    /// The simulator reply was unusable; a placeholder was recorded.
    ObservationFallback,
    /// The critic reply was unusable; the fallback score was used.
    CriticFallback,
}

/// Something that went wrong but did not stop the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub iter: u32,
    pub role: AgentRole,
    pub kind: DiagnosticKind,
    pub detail: String,
}

/// Role-aware wrapper around a backend that applies the retry budget and
/// keeps usage and diagnostics.
pub(super) struct Agents<'a, B: ?Sized> {
    backend: &'a B,
    usage: RoleUsage,
    diagnostics: Vec<Diagnostic>,
    iter: u32,
    iter_calls: u32,
}

impl<'a, B: AgentBackend + ?Sized> Agents<'a, B> {
    pub fn new(backend: &'a B) -> Self {
        Self {
            backend,
            usage: RoleUsage::default(),
            diagnostics: Vec::new(),
            iter: 0,
            iter_calls: 0,
        }
    }

    pub fn begin_iteration(&mut self, iter: u32) {
        self.iter = iter;
        self.iter_calls = 0;
    }

    pub fn iteration_calls(&self) -> u32 {
        self.iter_calls
    }

    pub fn finish(self) -> (RoleUsage, Vec<Diagnostic>) {
        (self.usage, self.diagnostics)
    }

    fn note(&mut self, role: AgentRole, kind: DiagnosticKind, detail: String) {
        warn!(iter = self.iter, %role, ?kind, "{detail}");
        self.diagnostics.push(Diagnostic {
            iter: self.iter,
            role,
            kind,
            detail,
        });
    }

    /// Asks `role` and parses the reply. Each logical call may use one
    /// retry, spent on either a failed request or an unparseable reply.
    /// Returns `Ok(None)` when the last reply still did not parse.
    fn ask<T, E: std::fmt::Display>(
        &mut self,
        role: AgentRole,
        prompt: &str,
        parse: impl Fn(&str) -> Result<T, E>,
    ) -> Result<Option<T>, EngineError> {
        let sampling = role.default_sampling();
        let mut last_parse_error = String::new();
        for attempt in 0..2 {
            self.iter_calls += 1;
            let completion = match self.backend.complete(role, prompt, &sampling) {
                Ok(c) => c,
                Err(e) if attempt == 0 => {
                    self.note(role, DiagnosticKind::BackendRetry, e.to_string());
                    continue;
                }
                Err(source) => {
                    return Err(EngineError::Backend {
                        role,
                        source,
                        diagnostics: std::mem::take(&mut self.diagnostics),
                        usage: std::mem::take(&mut self.usage),
                    })
                }
            };
            self.usage.record(role, completion.usage);
            match parse(&completion.text) {
                Ok(v) => return Ok(Some(v)),
                Err(e) => {
                    last_parse_error = e.to_string();
                    if attempt == 0 {
                        self.note(role, DiagnosticKind::ParseRetry, last_parse_error.clone());
                    }
                }
            }
        }
        let kind = match role {
            AgentRole::Planner => DiagnosticKind::PlannerUnparseable,
            AgentRole::Simulator => DiagnosticKind::ObservationFallback,
            AgentRole::Critic => DiagnosticKind::CriticFallback,
        };
        self.note(role, kind, last_parse_error);
        Ok(None)
    }

    pub fn propose(&mut self, prompt: &str) -> Result<Option<Action>, EngineError> {
        self.ask(AgentRole::Planner, prompt, parse_action)
    }

    pub fn simulate(&mut self, prompt: &str) -> Result<Observation, EngineError> {
        Ok(self
            .ask(AgentRole::Simulator, prompt, parse_observation)?
            .unwrap_or_else(|| Observation::new(UNPARSED_OBSERVATION).expect("single line")))
    }

    pub fn critique(&mut self, prompt: &str) -> Result<CriticVerdict, EngineError> {
        Ok(self
            .ask(AgentRole::Critic, prompt, parse_critic)?
            .unwrap_or_else(|| CriticVerdict::fallback("unparseable critic reply")))
    }
}
