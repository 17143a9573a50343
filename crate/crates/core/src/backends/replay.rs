use std::collections::VecDeque;
use std::sync::Mutex;

use crate::protocol::{
    estimate_tokens, AgentBackend, AgentRole, BackendError, Completion, SamplingParams, UsageCounters,
};

/// Hands out canned replies in order, whatever the prompt. Every call is
/// logged. Running out of replies is reported as [`BackendError::Unavailable`].
#[derive(Debug, Default)]
pub struct ReplayBackend {
    replies: Mutex<VecDeque<Result<String, BackendError>>>,
    log: Mutex<Vec<ReplayCall>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayCall {
    pub role: AgentRole,
    pub prompt: String,
    pub sampling: SamplingParams,
}

impl ReplayBackend {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_results(replies.into_iter().map(|s| Ok(s.into())))
    }

    pub fn with_results(replies: impl IntoIterator<Item = Result<String, BackendError>>) -> Self {
        Self {
            replies: Mutex::new(replies.into_iter().collect()),
            log: Mutex::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> Vec<ReplayCall> {
        self.log.lock().expect("replay log lock").clone()
    }

    pub fn remaining(&self) -> usize {
        self.replies.lock().expect("replay queue lock").len()
    }
}

impl AgentBackend for ReplayBackend {
    fn complete(&self, role: AgentRole, prompt: &str, sampling: &SamplingParams) -> Result<Completion, BackendError> {
        self.log.lock().expect("replay log lock").push(ReplayCall {
            role,
            prompt: prompt.to_string(),
            sampling: *sampling,
        });
        let next = self.replies.lock().expect("replay queue lock").pop_front();
        let text = next.unwrap_or_else(|| Err(BackendError::Unavailable("replay queue is empty".into())))?;
        let usage = UsageCounters::single_call(estimate_tokens(prompt), estimate_tokens(&text));
        Ok(Completion { text, usage })
    }
}
