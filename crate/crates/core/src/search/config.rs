use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::BaseRewardRubric;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("unsupported mode combination {0:?}")]
    UnsupportedModes(ModeFlags),
    #[error("unknown ablation `{0}`")]
    UnknownAblation(String),
}

/// Switches for the ablation study. Only the combinations listed in
/// [`AblationMode`] are accepted by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct ModeFlags {
    pub use_simulator: bool,
    pub use_critic: bool,
    pub use_planner_persona: bool,
    pub uniform_rewards: bool,
    pub standard_rollout: bool,
}

impl Default for ModeFlags {
    fn default() -> Self {
        AblationMode::Full.flags()
    }
}

impl ModeFlags {
    pub fn mode(&self) -> Result<AblationMode, ConfigError> {
        AblationMode::ALL
            .into_iter()
            .find(|m| m.flags() == *self)
            .ok_or(ConfigError::UnsupportedModes(*self))
    }
}

/// The search variants compared in the ablation study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AblationMode {
    /// Planner, simulator and critic all active.
    Full,
    /// Persona-free minimal planner prompt.
    NoPlanner,
    /// Observations replaced by a fixed placeholder.
    NoSimulator,
    /// Critic replaced by a constant score.
    NoCritic,
    /// Every expansion backpropagates the same constant reward.
    UniformRewards,
    /// Classical MCTS: random rollouts scored by the validity heuristic.
    StandardMcts,
}

impl AblationMode {
    pub const ALL: [AblationMode; 6] = [
        AblationMode::Full,
        AblationMode::NoPlanner,
        AblationMode::NoSimulator,
        AblationMode::NoCritic,
        AblationMode::UniformRewards,
        AblationMode::StandardMcts,
    ];

    pub fn flags(self) -> ModeFlags {
        let full = ModeFlags {
            use_simulator: true,
            use_critic: true,
            use_planner_persona: true,
            uniform_rewards: false,
            standard_rollout: false,
        };
        match self {
            AblationMode::Full => full,
            AblationMode::NoPlanner => ModeFlags {
                use_planner_persona: false,
                ..full
            },
            AblationMode::NoSimulator => ModeFlags {
                use_simulator: false,
                ..full
            },
            AblationMode::NoCritic => ModeFlags {
                use_critic: false,
                ..full
            },
            AblationMode::UniformRewards => ModeFlags {
                use_critic: false,
                uniform_rewards: true,
                ..full
            },
            AblationMode::StandardMcts => ModeFlags {
                use_simulator: false,
                use_critic: false,
                use_planner_persona: false,
                uniform_rewards: false,
                standard_rollout: true,
            },
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AblationMode::Full => "full",
            AblationMode::NoPlanner => "no-planner",
            AblationMode::NoSimulator => "no-simulator",
            AblationMode::NoCritic => "no-critic",
            AblationMode::UniformRewards => "uniform-rewards",
            AblationMode::StandardMcts => "standard-mcts",
        }
    }
}

impl fmt::Display for AblationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AblationMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let mode = match norm.as_str() {
            "full" => AblationMode::Full,
            "no-planner" | "no-planner-persona" | "use-planner-persona=false" => AblationMode::NoPlanner,
            "no-simulator" | "use-simulator=false" => AblationMode::NoSimulator,
            // the validator of the ablation table is the critic
            "no-critic" | "no-validator" | "use-critic=false" => AblationMode::NoCritic,
            "uniform-rewards" | "uniform" | "uniform-rewards=true" => AblationMode::UniformRewards,
            "standard-mcts" | "standard-rollout" | "standard-rollout=true" => AblationMode::StandardMcts,
            _ => return Err(ConfigError::UnknownAblation(s.to_string())),
        };
        Ok(mode)
    }
}

/// Search hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Iteration budget K.
    pub budget: u32,
    /// Exploration constant C of the UCT score.
    pub exploration: f64,
    /// Weight of the validity heuristic in the shaped reward.
    pub alpha: f64,
    /// Maximum plan depth D.
    pub max_depth: usize,
    /// Reward backpropagated from depth-limited dead ends.
    pub r_terminal: f64,
    /// Planner proposals per node before it counts as fully expanded.
    pub expansion_width: u32,
    pub modes: ModeFlags,
    pub rubric: BaseRewardRubric,
    /// Injects gold dependency hints into planner prompts. Debug only.
    pub dependency_hints: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 50,
            exploration: 1.5,
            alpha: 0.5,
            max_depth: 10,
            r_terminal: 0.0,
            expansion_width: 2,
            modes: ModeFlags::default(),
            rubric: BaseRewardRubric::default(),
            dependency_hints: false,
        }
    }
}

impl SearchConfig {
    /// Score that stands in for the critic when it is disabled.
    pub const NEUTRAL_CRITIC_SCORE: f64 = 0.5;
    /// Reward used for every expansion under uniform rewards.
    pub const UNIFORM_REWARD: f64 = 0.5;

    pub fn with_mode(mut self, mode: AblationMode) -> Self {
        self.modes = mode.flags();
        self
    }

    pub fn validate(&self) -> Result<AblationMode, ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        if self.budget < 1 {
            return invalid("budget must be at least 1".into());
        }
        if self.max_depth < 1 {
            return invalid("max_depth must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return invalid(format!("alpha = {} is outside [0, 1]", self.alpha));
        }
        if !(self.exploration.is_finite() && self.exploration >= 0.0) {
            return invalid(format!("exploration = {} must be finite and >= 0", self.exploration));
        }
        if !(0.0..=1.0).contains(&self.r_terminal) {
            return invalid(format!("r_terminal = {} is outside [0, 1]", self.r_terminal));
        }
        if self.expansion_width < 1 {
            return invalid("expansion_width must be at least 1".into());
        }
        let r = &self.rubric;
        if ![r.valid, r.partial, r.unknown].iter().all(|v| (0.0..=1.0).contains(v)) {
            return invalid("rubric scores must lie in [0, 1]".into());
        }
        if self.modes.standard_rollout && self.modes.use_critic {
            return invalid("standard rollouts exclude the critic".into());
        }
        self.modes.mode()
    }
}
