//! Line-delimited JSON record of every search iteration.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NodeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEventKind {
    /// A new child was created and scored.
    Expand,
    /// The proposal matched an existing child, whose stored reward was
    /// replayed.
    Duplicate,
    /// The selected node was terminal.
    Terminal,
    /// The planner produced nothing usable.
    PlannerFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub iter: u32,
    pub selected_node: NodeId,
    /// Node the reward was backpropagated from.
    pub backprop_node: NodeId,
    pub event: TraceEventKind,
    pub action: Option<String>,
    pub r_base: Option<f64>,
    pub rho_ref: Option<f64>,
    #[serde(rename = "R_t")]
    pub reward: f64,
    /// Backend calls made during the iteration, retries included.
    pub calls: u32,
    /// Actions drawn by a random rollout, when one was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rollout: Option<Vec<String>>,
}

pub fn write_trace(path: &Path, events: &[TraceEvent]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for e in events {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_trace(path: &Path) -> io::Result<Vec<TraceEvent>> {
    BufReader::new(File::open(path)?)
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.trim().is_empty()))
        .map(|l| serde_json::from_str(&l?).map_err(io::Error::from))
        .collect()
}
