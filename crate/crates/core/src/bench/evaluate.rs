use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{args_equivalent, Action, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Success,
    Failure,
}

impl Verdict {
    pub fn is_success(self) -> bool {
        self == Verdict::Success
    }
}

/// How a predicted plan is compared with the gold plan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchPolicy {
    /// Same multiset of calls with normalized arguments, in an order that
    /// respects the gold dependency edges, ending in `finish`.
    #[default]
    Normalized,
    /// The gold sequence call for call (arguments still normalized).
    ExactSequence,
}

pub fn evaluate_plan(predicted: &[Action], task: &Task) -> Verdict {
    evaluate_plan_with(MatchPolicy::Normalized, predicted, task)
}

pub fn evaluate_plan_with(policy: MatchPolicy, predicted: &[Action], task: &Task) -> Verdict {
    let Some((last, calls)) = predicted.split_last() else {
        return Verdict::Failure;
    };
    if !last.is_finish() || calls.iter().any(Action::is_finish) || calls.len() != task.gold_plan.len() {
        return Verdict::Failure;
    }
    let found = match policy {
        MatchPolicy::ExactSequence => {
            let identity: Vec<usize> = (0..calls.len()).collect();
            (0..calls.len()).all(|p| call_matches(task, calls, &identity, p, p))
        }
        MatchPolicy::Normalized => {
            let mut assigned = Vec::with_capacity(calls.len());
            let mut used = vec![false; calls.len()];
            assign(task, calls, &mut assigned, &mut used)
        }
    };
    if found {
        Verdict::Success
    } else {
        Verdict::Failure
    }
}

/// Backtracking search for a gold step for each predicted call, in order.
/// `assigned[p]` is the gold index of predicted call `p`.
fn assign(task: &Task, calls: &[Action], assigned: &mut Vec<usize>, used: &mut [bool]) -> bool {
    let p = assigned.len();
    if p == calls.len() {
        return true;
    }
    for g in 0..task.gold_plan.len() {
        if used[g] || !call_matches(task, calls, assigned, p, g) {
            continue;
        }
        // every prerequisite of g must already be placed
        if task.gold_edges.iter().any(|&(a, b)| b == g && !used[a]) {
            continue;
        }
        used[g] = true;
        assigned.push(g);
        if assign(task, calls, assigned, used) {
            return true;
        }
        assigned.pop();
        used[g] = false;
    }
    false
}

fn call_matches(task: &Task, calls: &[Action], assigned: &[usize], p: usize, g: usize) -> bool {
    let gold = &task.gold_plan[g];
    let Action::ApiCall { tool, args } = &calls[p] else {
        return false;
    };
    if *tool != gold.tool {
        return false;
    }
    let mut resolved = args.clone();
    for v in resolved.values_mut() {
        if let Some(n) = v.as_str().and_then(step_reference) {
            // a reference to an earlier call stands for that call's output
            if n >= 1 && n - 1 < p {
                *v = Value::String(task.gold_output(assigned[n - 1]));
            }
        }
    }
    args_equivalent(&resolved, &gold.args)
}

/// The step number in an `<output of step N>` reference.
pub fn step_reference(value: &str) -> Option<usize> {
    value
        .trim()
        .strip_prefix("<output of step ")?
        .strip_suffix('>')?
        .trim()
        .parse()
        .ok()
}
