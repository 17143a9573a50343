//! The planner/simulator/critic contract: prompt construction for each role
//! and parsers for their structured replies.

mod agent;
mod prompts;
mod replies;

pub use agent::{
    estimate_tokens, AgentBackend, AgentRole, BackendError, Completion, RoleUsage, SamplingParams,
    UsageCounters,
};
pub use prompts::{
    build_cot_prompt, build_critic_prompt, build_minimal_planner_prompt, build_planner_prompt,
    build_simulator_prompt, dependency_hints, extract_section, parse_tools_block,
    tools_description, PromptError, PromptKind, COT_TEMPLATE, CRITIC_TEMPLATE,
    MINIMAL_PLANNER_TEMPLATE, PLANNER_TEMPLATE, SIMULATOR_TEMPLATE,
};
pub use replies::{
    parse_critic, parse_observation, CriticParseError, CriticVerdict, ObservationParseError,
    OBSERVATION_MARKER,
};
