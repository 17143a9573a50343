//! Tasks, tools, actions, observations and plan states.
//!
//! Everything in here is a plain immutable value. The search tree, the agent
//! protocol and the benchmark harness all speak this vocabulary.

mod action;
mod literal;
mod normalize;
mod state;
mod task;
mod tool;

pub use action::{parse_action, Action, ActionParseError, Args};
pub use normalize::{args_equivalent, normalize_args, normalize_value};
pub(crate) use state::OBSERVATION_PREFIX;
pub use state::{Observation, PlanState, StateError, Step, EMPTY_PLAN};
pub(crate) use task::validate_catalog;
pub use task::{Complexity, GoldStep, Task, TaskError};
pub use tool::{ParamSpec, ParamType, ToolSpec};
