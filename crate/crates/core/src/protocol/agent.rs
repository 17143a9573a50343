use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentRole {
    Planner,
    Simulator,
    Critic,
}

impl AgentRole {
    pub const ALL: [AgentRole; 3] = [AgentRole::Planner, AgentRole::Simulator, AgentRole::Critic];

    pub fn as_str(self) -> &'static str {
        match self {
            AgentRole::Planner => "planner",
            AgentRole::Simulator => "simulator",
            AgentRole::Critic => "critic",
        }
    }

    /// Default sampling: the planner runs slightly warm, simulator and
    /// critic are greedy.
    pub fn default_sampling(self) -> SamplingParams {
        match self {
            AgentRole::Planner => SamplingParams::new(0.1, SamplingParams::DEFAULT_MAX_OUTPUT),
            AgentRole::Simulator | AgentRole::Critic => {
                SamplingParams::new(0.0, SamplingParams::DEFAULT_MAX_OUTPUT)
            }
        }
    }
}

impl fmt::Display for AgentRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub max_output: u32,
}

impl SamplingParams {
    pub const DEFAULT_MAX_OUTPUT: u32 = 256;

    pub fn new(temperature: f64, max_output: u32) -> Self {
        debug_assert!(temperature >= 0.0);
        Self {
            temperature: temperature.max(0.0),
            max_output,
        }
    }

    pub fn with_temperature(self, temperature: f64) -> Self {
        Self::new(temperature, self.max_output)
    }
}

/// Token and call accounting. Additive across calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UsageCounters {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub calls: u64,
}

impl UsageCounters {
    pub fn single_call(prompt_tokens: u64, completion_tokens: u64) -> Self {
        Self {
            prompt_tokens,
            completion_tokens,
            calls: 1,
        }
    }

    pub fn total_tokens(&self) -> u64 {
        self.prompt_tokens + self.completion_tokens
    }
}

impl Add for UsageCounters {
    type Output = UsageCounters;

    fn add(self, rhs: Self) -> Self {
        UsageCounters {
            prompt_tokens: self.prompt_tokens + rhs.prompt_tokens,
            completion_tokens: self.completion_tokens + rhs.completion_tokens,
            calls: self.calls + rhs.calls,
        }
    }
}

impl AddAssign for UsageCounters {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl std::iter::Sum for UsageCounters {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(UsageCounters::default(), Add::add)
    }
}

/// Token estimate used when a provider reports no usage: one token per four
/// characters, rounded up.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// Usage broken down by role.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleUsage(BTreeMap<AgentRole, UsageCounters>);

impl RoleUsage {
    pub fn record(&mut self, role: AgentRole, usage: UsageCounters) {
        *self.0.entry(role).or_default() += usage;
    }

    pub fn get(&self, role: AgentRole) -> UsageCounters {
        self.0.get(&role).copied().unwrap_or_default()
    }

    pub fn total(&self) -> UsageCounters {
        self.0.values().copied().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AgentRole, UsageCounters)> + '_ {
        self.0.iter().map(|(r, u)| (*r, *u))
    }
}

/// One model reply plus what it cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub usage: UsageCounters,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("request timed out")]
    Timeout,
    #[error("HTTP status {0}")]
    HttpStatus(u16),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("backend unavailable: {0}")]
    Unavailable(String),
}

/// Anything that can answer a prompt in one of the three roles.
///
/// Implementations must tolerate concurrent calls from independent task
/// searches.
pub trait AgentBackend: Send + Sync {
    fn complete(
        &self,
        role: AgentRole,
        prompt: &str,
        sampling: &SamplingParams,
    ) -> Result<Completion, BackendError>;
}

impl<B: AgentBackend + ?Sized> AgentBackend for &B {
    fn complete(
        &self,
        role: AgentRole,
        prompt: &str,
        sampling: &SamplingParams,
    ) -> Result<Completion, BackendError> {
        (**self).complete(role, prompt, sampling)
    }
}

impl<B: AgentBackend + ?Sized> AgentBackend for Box<B> {
    fn complete(
        &self,
        role: AgentRole,
        prompt: &str,
        sampling: &SamplingParams,
    ) -> Result<Completion, BackendError> {
        (**self).complete(role, prompt, sampling)
    }
}
