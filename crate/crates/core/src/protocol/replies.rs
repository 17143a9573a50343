use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{Observation, StateError};

/// Marker that introduces the simulated value on an observation line.
pub const OBSERVATION_MARKER: &str = "tool_output =";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObservationParseError {
    #[error("no `{OBSERVATION_MARKER}` marker in reply {0:?}")]
    MissingMarker(String),
    #[error("empty observation value in reply {0:?}")]
    EmptyValue(String),
}

/// Pulls the simulated value out of a simulator reply: the text after the
/// first `tool_output =` on its line, trimmed.
pub fn parse_observation(text: &str) -> Result<Observation, ObservationParseError> {
    let line = text
        .lines()
        .find(|l| l.contains(OBSERVATION_MARKER))
        .ok_or_else(|| ObservationParseError::MissingMarker(text.to_string()))?;
    let at = line.find(OBSERVATION_MARKER).unwrap_or_default() + OBSERVATION_MARKER.len();
    let value = line[at..].trim().trim_end_matches('`').trim();
    if value.is_empty() {
        return Err(ObservationParseError::EmptyValue(text.to_string()));
    }
    Observation::new(value).map_err(|e| match e {
        StateError::MultilineObservation(v) => ObservationParseError::EmptyValue(v),
        _ => unreachable!("Observation::new only rejects multi-line values"),
    })
}

/// The critic's reflection score and its stated reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticVerdict {
    /// Always within `[0, 1]`.
    pub score: f64,
    pub justification: String,
    /// Set when the reply could not be parsed and the score is a fallback.
    #[serde(default)]
    pub fallback: bool,
}

impl CriticVerdict {
    /// The verdict used when a critic reply is unusable.
    pub fn fallback(reason: impl Into<String>) -> Self {
        Self {
            score: 0.0,
            justification: reason.into(),
            fallback: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriticParseError {
    #[error("no numeric `Score:` field in reply {0:?}")]
    MissingScore(String),
}

pub fn parse_critic(text: &str) -> Result<CriticVerdict, CriticParseError> {
    let missing = || CriticParseError::MissingScore(text.to_string());
    let at = text.find("Score:").ok_or_else(missing)? + "Score:".len();
    let token: String = text[at..]
        .trim_start()
        .chars()
        .take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        .collect();
    let score: f64 = token.parse().map_err(|_| missing())?;
    if !score.is_finite() {
        return Err(missing());
    }
    let justification = text
        .find("Justification:")
        .map(|j| text[j + "Justification:".len()..].lines().next().unwrap_or("").trim())
        .unwrap_or("")
        .trim_end_matches('`')
        .trim()
        .to_string();
    Ok(CriticVerdict {
        score: score.clamp(0.0, 1.0),
        justification,
        fallback: false,
    })
}
