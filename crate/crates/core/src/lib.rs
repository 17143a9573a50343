//! Grounded, reflective Monte Carlo tree search for multi-step tool-use
//! planning.
//!
//! A single language model plays three roles inside a UCT search loop: a
//! *planner* proposes the next tool call, a *simulator* predicts what that
//! call would return, and a *critic* scores the partial plan. The critic's
//! score is blended with a cheap validity heuristic into a dense per-step
//! reward that drives backpropagation.
//!
//! The crate is organised bottom-up:
//!
//! - [`domain`]: tasks, tools, actions, observations and plan states.
//! - [`protocol`]: prompt templates for the three roles and parsers for
//!   their replies.
//! - [`search`]: the tree, UCT selection, reward shaping, backpropagation
//!   and best-plan extraction.
//! - [`engine`]: the search loop itself, the standard-MCTS baseline and the
//!   ablation modes.
//! - [`backends`]: a deterministic scripted oracle and an HTTP
//!   chat-completion client.
//! - [`bench`]: datasets, sampling, the chain-of-thought baseline, plan
//!   evaluation, metrics and experiment orchestration.
//!
//! The guide in `book/` walks through each layer with runnable snippets.

pub mod backends;
pub mod bench;
pub mod domain;
pub mod engine;
pub mod protocol;
pub mod search;

pub use domain::{parse_action, Action, Observation, PlanState, Task, ToolSpec};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/domain.md")]
    mod domain {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/backends.md")]
    mod backends {}
    #[doc = include_str!("../../../book/src/bench.md")]
    mod bench {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
