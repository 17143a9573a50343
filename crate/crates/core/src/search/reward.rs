use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Action, ToolSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewardError {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },
}

fn unit(name: &'static str, value: f64) -> Result<f64, RewardError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(RewardError::Domain { name, value })
    }
}

/// Blends the validity heuristic with the critic's reflection score:
/// `alpha * r_base + (1 - alpha) * rho_ref`.
pub fn shape_reward(r_base: f64, rho_ref: f64, alpha: f64) -> Result<f64, RewardError> {
    let r_base = unit("r_base", r_base)?;
    let rho_ref = unit("rho_ref", rho_ref)?;
    let alpha = unit("alpha", alpha)?;
    Ok(alpha * r_base + (1.0 - alpha) * rho_ref)
}

/// Scores for the three validity levels of [`base_reward`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseRewardRubric {
    /// Known tool, every required parameter present with its declared type.
    pub valid: f64,
    /// Known tool, parameters missing, mistyped or undeclared.
    pub partial: f64,
    /// Tool not in the catalog.
    pub unknown: f64,
}

impl Default for BaseRewardRubric {
    fn default() -> Self {
        Self {
            valid: 1.0,
            partial: 0.5,
            unknown: 0.0,
        }
    }
}

impl BaseRewardRubric {
    pub fn score(&self, action: &Action, catalog: &[ToolSpec]) -> f64 {
        let (tool, args) = match action {
            Action::Finish { .. } => return self.valid,
            Action::ApiCall { tool, args } => (tool, args),
        };
        let Some(spec) = catalog.iter().find(|t| &t.name == tool) else {
            return self.unknown;
        };
        let required_ok = spec
            .params
            .iter()
            .filter(|p| p.required)
            .all(|p| args.get(&p.name).is_some_and(|v| p.param_type.accepts(v)));
        let supplied_ok = args
            .iter()
            .all(|(k, v)| spec.param(k).is_some_and(|p| p.param_type.accepts(v)));
        if required_ok && supplied_ok {
            self.valid
        } else {
            self.partial
        }
    }
}

/// Validity heuristic with the default 1.0 / 0.5 / 0.0 rubric.
pub fn base_reward(action: &Action, catalog: &[ToolSpec]) -> f64 {
    BaseRewardRubric::default().score(action, catalog)
}
