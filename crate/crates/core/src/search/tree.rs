use std::fmt;

use serde::{Deserialize, Serialize};

use crate::domain::{Action, PlanState};

/// Index of a node in its tree's arena.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchNode {
    pub id: NodeId,
    pub parent: Option<NodeId>,
    pub state: PlanState,
    pub incoming_action: Option<Action>,
    /// Sum of every reward backpropagated through this node.
    pub value: f64,
    pub visits: u64,
    pub children: Vec<NodeId>,
    pub terminal: bool,
    pub depth: usize,
    /// Reward assigned when the node was created, replayed when the node is
    /// reached again without a new expansion.
    pub reward: Option<f64>,
    /// Number of planner proposals made from this node.
    pub expansions: u32,
}

impl SearchNode {
    pub fn mean(&self) -> Option<f64> {
        (self.visits > 0).then(|| self.value / self.visits as f64)
    }

    pub fn ends_in_finish(&self) -> bool {
        self.state.is_terminal()
    }
}

/// Arena-backed search tree. Node 0 is the root; children are kept in
/// creation order, which doubles as the tie-break order everywhere.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    max_depth: usize,
    expansion_width: u32,
}

impl SearchTree {
    pub fn new(root_state: PlanState, max_depth: usize, expansion_width: u32) -> Self {
        let terminal = root_state.is_terminal() || max_depth == 0;
        Self {
            nodes: vec![SearchNode {
                id: NodeId(0),
                parent: None,
                state: root_state,
                incoming_action: None,
                value: 0.0,
                visits: 0,
                children: Vec::new(),
                terminal,
                depth: 0,
                reward: None,
                expansions: 0,
            }],
            max_depth,
            expansion_width: expansion_width.max(1),
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.max_depth
    }

    pub fn expansion_width(&self) -> u32 {
        self.expansion_width
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id.0]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut SearchNode {
        &mut self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &SearchNode> {
        self.nodes[id.0].children.iter().map(|c| &self.nodes[c.0])
    }

    /// Adds a child reached by `action`, counting it as one expansion of
    /// `parent`.
    pub fn add_child(&mut self, parent: NodeId, action: Action, state: PlanState) -> NodeId {
        let id = NodeId(self.nodes.len());
        let depth = self.nodes[parent.0].depth + 1;
        let terminal = state.is_terminal() || depth >= self.max_depth;
        self.nodes.push(SearchNode {
            id,
            parent: Some(parent),
            state,
            incoming_action: Some(action),
            value: 0.0,
            visits: 0,
            children: Vec::new(),
            terminal,
            depth,
            reward: None,
            expansions: 0,
        });
        let p = &mut self.nodes[parent.0];
        p.children.push(id);
        p.expansions += 1;
        id
    }

    /// Counts a proposal from `id` that did not create a child.
    pub fn note_expansion_attempt(&mut self, id: NodeId) {
        self.nodes[id.0].expansions += 1;
    }

    /// The child of `parent` whose incoming action renders to `canonical`.
    pub fn find_child(&self, parent: NodeId, canonical: &str) -> Option<NodeId> {
        self.children(parent)
            .find(|c| c.incoming_action.as_ref().is_some_and(|a| a.canonical() == canonical))
            .map(|c| c.id)
    }

    /// A node can still receive new proposals.
    pub fn is_expandable(&self, id: NodeId) -> bool {
        let n = &self.nodes[id.0];
        !n.terminal && n.expansions < self.expansion_width
    }

    /// Root-first list of node ids ending at `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.nodes[cur.0].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Actions along the path from the root to `id`.
    pub fn actions_to(&self, id: NodeId) -> Vec<Action> {
        self.path_to(id)
            .into_iter()
            .filter_map(|n| self.nodes[n.0].incoming_action.clone())
            .collect()
    }

    /// Descends from the root by maximal UCT until reaching a node with no
    /// children or one that can still be expanded. Ties go to the
    /// first-created child.
    pub fn select_leaf(&self, exploration: f64) -> NodeId {
        let mut cur = self.root();
        loop {
            let node = &self.nodes[cur.0];
            if node.children.is_empty() || self.is_expandable(cur) {
                return cur;
            }
            let mut best = node.children[0];
            let mut best_score = uct_score(&self.nodes[best.0], node, exploration);
            for &c in &node.children[1..] {
                let s = uct_score(&self.nodes[c.0], node, exploration);
                if s > best_score {
                    best = c;
                    best_score = s;
                }
            }
            cur = best;
        }
    }

    /// Adds `reward` to the value and one to the visit count of `id` and
    /// every ancestor.
    pub fn backpropagate(&mut self, id: NodeId, reward: f64) {
        let mut cur = Some(id);
        while let Some(n) = cur {
            let node = &mut self.nodes[n.0];
            node.visits += 1;
            node.value += reward;
            cur = node.parent;
        }
    }

    /// Greedy descent by mean value over visited children (ties: more
    /// visits, then first-created), stopping at a terminal node or one with
    /// no visited children. Returns the end node of the path.
    pub fn best_leaf(&self) -> NodeId {
        let mut cur = self.root();
        loop {
            let node = &self.nodes[cur.0];
            if node.terminal && cur != self.root() {
                return cur;
            }
            let mut best: Option<&SearchNode> = None;
            for child in self.children(cur).filter(|c| c.visits > 0) {
                best = match best {
                    Some(b) if !prefer(child, b) => Some(b),
                    _ => Some(child),
                };
            }
            match best {
                Some(b) => cur = b.id,
                None => return cur,
            }
        }
    }

    /// The incoming actions along [`SearchTree::best_leaf`]'s path. Empty
    /// when the root has no visited children.
    pub fn extract_best_plan(&self) -> Vec<Action> {
        self.actions_to(self.best_leaf())
    }
}

/// Strict preference of `a` over an earlier sibling `b` in plan extraction.
fn prefer(a: &SearchNode, b: &SearchNode) -> bool {
    let (ma, mb) = (a.value / a.visits as f64, b.value / b.visits as f64);
    ma > mb || (ma == mb && a.visits > b.visits)
}

/// Upper confidence bound for trees. Unvisited children score `+inf` so they
/// are always tried before any visited sibling.
pub fn uct_score(child: &SearchNode, parent: &SearchNode, exploration: f64) -> f64 {
    uct(child.value, child.visits, parent.visits, exploration)
}

/// [`uct_score`] on raw statistics.
pub fn uct(value: f64, visits: u64, parent_visits: u64, exploration: f64) -> f64 {
    if visits == 0 {
        return f64::INFINITY;
    }
    debug_assert!(parent_visits >= 1);
    let c = visits as f64;
    value / c + exploration * ((parent_visits as f64).ln() / c).sqrt()
}
