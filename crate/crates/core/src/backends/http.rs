//! Chat-completion client for live runs.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tracing::debug;

use crate::protocol::{
    estimate_tokens, AgentBackend, AgentRole, BackendError, Completion, SamplingParams, UsageCounters,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HttpBackendConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token. No
    /// `Authorization` header is sent when unset.
    pub api_key_env: Option<String>,
    /// Per-role overrides. When absent the caller's sampling is used, which
    /// for the search engine means each role's default.
    pub planner: Option<SamplingParams>,
    pub simulator: Option<SamplingParams>,
    pub critic: Option<SamplingParams>,
    pub timeout_secs: f64,
    /// Upper bound on `max_tokens` for every request.
    pub max_output: u32,
}

impl Default for HttpBackendConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model: "default".into(),
            api_key_env: None,
            planner: None,
            simulator: None,
            critic: None,
            timeout_secs: 60.0,
            max_output: SamplingParams::DEFAULT_MAX_OUTPUT,
        }
    }
}

impl HttpBackendConfig {
    /// Sampling actually sent for `role`.
    pub fn sampling_for(&self, role: AgentRole, requested: &SamplingParams) -> SamplingParams {
        let chosen = match role {
            AgentRole::Planner => self.planner,
            AgentRole::Simulator => self.simulator,
            AgentRole::Critic => self.critic,
        }
        .unwrap_or(*requested);
        SamplingParams::new(chosen.temperature, chosen.max_output.min(self.max_output))
    }
}

/// Sends one single-message request per call. Never retries: the engine owns
/// the retry budget, so call counts stay exact.
#[derive(Debug)]
pub struct HttpBackend {
    config: HttpBackendConfig,
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: HttpBackendConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs_f64(config.timeout_secs.max(0.001))))
            .http_status_as_error(false)
            .build()
            .into();
        Self { config, agent }
    }

    pub fn config(&self) -> &HttpBackendConfig {
        &self.config
    }

    /// The JSON body sent for one call.
    pub fn request_body(&self, role: AgentRole, prompt: &str, sampling: &SamplingParams) -> Value {
        let s = self.config.sampling_for(role, sampling);
        json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": s.temperature,
            "max_tokens": s.max_output,
        })
    }
}

impl AgentBackend for HttpBackend {
    fn complete(&self, role: AgentRole, prompt: &str, sampling: &SamplingParams) -> Result<Completion, BackendError> {
        let body = self.request_body(role, prompt, sampling);
        let mut request = self.agent.post(&self.config.endpoint);
        if let Some(var) = &self.config.api_key_env {
            let key = std::env::var(var)
                .map_err(|_| BackendError::Unavailable(format!("environment variable {var} is not set")))?;
            request = request.header("Authorization", format!("Bearer {key}"));
        }
        debug!(%role, endpoint = %self.config.endpoint, "sending completion request");
        let mut response = request.send_json(&body).map_err(transport_error)?;
        let status = response.status().as_u16();
        if status >= 400 {
            return Err(BackendError::HttpStatus(status));
        }
        let text = response.body_mut().read_to_string().map_err(transport_error)?;
        parse_completion(prompt, &text)
    }
}

fn transport_error(e: ureq::Error) -> BackendError {
    match e {
        ureq::Error::Timeout(_) => BackendError::Timeout,
        ureq::Error::StatusCode(code) => BackendError::HttpStatus(code),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => BackendError::Timeout,
        other => BackendError::Transport(other.to_string()),
    }
}

/// Extracts the first choice and the usage block of a chat-completion
/// response. Missing usage falls back to [`estimate_tokens`].
pub fn parse_completion(prompt: &str, body: &str) -> Result<Completion, BackendError> {
    let json: Value =
        serde_json::from_str(body).map_err(|e| BackendError::MalformedResponse(format!("not JSON: {e}")))?;
    let text = json
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| BackendError::MalformedResponse("no choices[0].message.content".into()))?
        .to_string();
    let reported = |key: &str| json.pointer(&format!("/usage/{key}")).and_then(Value::as_u64);
    let usage = UsageCounters::single_call(
        reported("prompt_tokens").unwrap_or_else(|| estimate_tokens(prompt)),
        reported("completion_tokens").unwrap_or_else(|| estimate_tokens(&text)),
    );
    Ok(Completion { text, usage })
}
