use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Verdict;
use crate::domain::{Action, Complexity};
use crate::engine::Diagnostic;
use crate::protocol::UsageCounters;
use crate::search::{AblationMode, ConfigError};

/// A method under evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Full search with planner, simulator and critic.
    Spiral,
    /// Chain-of-thought with `k` self-consistency samples.
    Cot(u32),
    /// Classical MCTS with `n` iterations.
    Mcts(u32),
    Ablation(AblationMode),
}

impl Method {
    /// Whether the search budget and reward weight sweeps apply.
    pub fn is_swept(self) -> bool {
        matches!(self, Method::Spiral | Method::Ablation(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Spiral => f.write_str("spiral"),
            Method::Cot(k) => write!(f, "cot_{k}"),
            Method::Mcts(n) => write!(f, "mcts_{n}"),
            Method::Ablation(m) => write!(f, "ablation_{}", m.as_str().replace('-', "_")),
        }
    }
}

impl FromStr for Method {
    type Err = ConfigError;

    /// Accepts the command-line forms (`cot:3`, `mcts:50`,
    /// `ablation:no-simulator`) and the record labels (`cot_3`, ...).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("spiral") {
            return Ok(Method::Spiral);
        }
        let (head, tail) = s
            .split_once([':', '_'])
            .ok_or_else(|| ConfigError::Invalid(format!("unknown method `{s}`")))?;
        let count = |what: &str| -> Result<u32, ConfigError> {
            match tail.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(ConfigError::Invalid(format!("{what} needs a positive count, got `{s}`"))),
            }
        };
        match head.to_ascii_lowercase().as_str() {
            "cot" => Ok(Method::Cot(count("cot")?)),
            "mcts" => Ok(Method::Mcts(count("mcts")?)),
            "ablation" => match tail.parse::<AblationMode>()? {
                AblationMode::Full => Ok(Method::Spiral),
                AblationMode::StandardMcts => Err(ConfigError::Invalid(
                    "standard MCTS is selected with mcts:N".into(),
                )),
                mode => Ok(Method::Ablation(mode)),
            },
            _ => Err(ConfigError::Invalid(format!("unknown method `{s}`"))),
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One method run on one task under one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub task_id: String,
    pub method: Method,
    pub seed: u64,
    /// Search budget, for methods that search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub predicted_plan: Vec<Action>,
    pub verdict: Verdict,
    pub complexity: Complexity,
    pub usage: UsageCounters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
    /// Set when the run aborted; the verdict is then a failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    /// Wall-clock seconds. Kept out of the record file so reruns compare
    /// byte for byte; written to the timings file instead.
    #[serde(skip)]
    pub wall_time: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_labels_round_trip() {
        for (cli, label) in [
            ("spiral", "spiral"),
            ("cot:3", "cot_3"),
            ("mcts:50", "mcts_50"),
            ("ablation:no-simulator", "ablation_no_simulator"),
            ("ablation:no-validator", "ablation_no_critic"),
            ("ablation:uniform-rewards", "ablation_uniform_rewards"),
        ] {
            let m: Method = cli.parse().unwrap();
            assert_eq!(m.to_string(), label);
            assert_eq!(label.parse::<Method>().unwrap(), m);
        }
        assert!("cot:0".parse::<Method>().is_err());
        assert!("beam:3".parse::<Method>().is_err());
    }
}
