//! The search tree and its arithmetic: UCT selection, reward shaping,
//! backpropagation and best-plan extraction.

mod config;
mod reward;
mod trace;
mod tree;

pub use config::{AblationMode, ConfigError, ModeFlags, SearchConfig};
pub use reward::{base_reward, shape_reward, BaseRewardRubric, RewardError};
pub use trace::{read_trace, write_trace, TraceEvent, TraceEventKind};
pub use tree::{uct, uct_score, NodeId, SearchNode, SearchTree};
