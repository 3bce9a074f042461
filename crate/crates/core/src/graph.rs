//! Immutable action-labelled directed graphs.
//!
//! Every node owns an ordered list of outgoing arcs. The position of an arc
//! in that list is its [`ActionId`]; the arc additionally carries a small
//! direction label so that policies which "repeat the same move" can find
//! the matching action at the next node. Undirected families emit both
//! arcs of every edge.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Position of an arc in its source node's out-list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub usize);

impl ActionId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outgoing arc: successor node plus the direction label of the move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub to: NodeId,
    pub label: u16,
}

/// Compressed adjacency storage; see the module docs.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    name: String,
    params: Vec<(String, String)>,
    offsets: Vec<usize>,
    arcs: Vec<Arc>,
}

impl Graph {
    /// Builds a graph from per-node arc lists.
    ///
    /// Rejects successors outside `0..m` and nodes without outgoing arcs.
    /// Connectivity is not enforced here; see [`Graph::is_connected`].
    pub fn from_arcs(name: impl Into<String>, lists: Vec<Vec<Arc>>) -> Result<Self> {
        let m = lists.len();
        if m == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let mut offsets = Vec::with_capacity(m + 1);
        let mut arcs = Vec::with_capacity(lists.iter().map(Vec::len).sum());
        offsets.push(0);
        for (i, list) in lists.into_iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidGraph(format!(
                    "node {i} has no outgoing action"
                )));
            }
            for arc in list {
                if arc.to.0 >= m {
                    return Err(Error::NodeOutOfRange {
                        node: arc.to.0,
                        nodes: m,
                    });
                }
                arcs.push(arc);
            }
            offsets.push(arcs.len());
        }
        Ok(Graph {
            name: name.into(),
            params: Vec::new(),
            offsets,
            arcs,
        })
    }

    /// Same as [`Graph::from_arcs`] with each arc labelled by its position.
    pub fn from_successors(name: impl Into<String>, lists: Vec<Vec<usize>>) -> Result<Self> {
        let lists = lists
            .into_iter()
            .map(|succ| {
                succ.into_iter()
                    .enumerate()
                    .map(|(a, j)| Arc {
                        to: NodeId(j),
                        label: a as u16,
                    })
                    .collect()
            })
            .collect();
        Self::from_arcs(name, lists)
    }

    /// Undirected simple graph from an edge list; actions sorted by neighbour id.
    pub fn from_edges(name: impl Into<String>, m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut lists = vec![Vec::new(); m];
        for &(u, v) in edges {
            if u >= m || v >= m {
                return Err(Error::NodeOutOfRange {
                    node: u.max(v),
                    nodes: m,
                });
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        for list in &mut lists {
            list.sort_unstable();
        }
        Self::from_successors(name, lists)
    }

    pub fn with_params(mut self, params: Vec<(String, String)>) -> Self {
        self.params = params;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    /// Number of outgoing actions at `i`.
    pub fn degree(&self, i: NodeId) -> usize {
        self.offsets[i.0 + 1] - self.offsets[i.0]
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn arcs(&self, i: NodeId) -> &[Arc] {
        &self.arcs[self.offsets[i.0]..self.offsets[i.0 + 1]]
    }

    pub fn successor(&self, i: NodeId, a: ActionId) -> NodeId {
        self.arcs(i)[a.0].to
    }

    /// Index of arc `(i, a)` in a flat per-arc table.
    pub fn arc_index(&self, i: NodeId, a: ActionId) -> usize {
        debug_assert!(a.0 < self.degree(i));
        self.offsets[i.0] + a.0
    }

    pub(crate) fn arc_range(&self, i: NodeId) -> std::ops::Range<usize> {
        self.offsets[i.0]..self.offsets[i.0 + 1]
    }

    /// First action at `i` carrying `label`, if any.
    pub fn find_label(&self, i: NodeId, label: u16) -> Option<ActionId> {
        self.arcs(i)
            .iter()
            .position(|arc| arc.label == label)
            .map(ActionId)
    }

    pub fn check_node(&self, i: NodeId) -> Result<()> {
        if i.0 < self.node_count() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange {
                node: i.0,
                nodes: self.node_count(),
            })
        }
    }

    /// Whether every arc `i -> j` with `i != j` has a reverse arc `j -> i`.
    pub fn is_symmetric(&self) -> bool {
        self.nodes().all(|i| {
            self.arcs(i)
                .iter()
                .filter(|arc| arc.to != i)
                .all(|arc| self.arcs(arc.to).iter().any(|back| back.to == i))
        })
    }

    /// BFS distances from `source`; `None` for unreachable nodes.
    pub fn distances_from(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source.0] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.0].unwrap();
            for arc in self.arcs(u) {
                if dist[arc.to.0].is_none() {
                    dist[arc.to.0] = Some(du + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        dist
    }

    fn reversed_reaches_all(&self) -> bool {
        let m = self.node_count();
        let mut rev = vec![Vec::new(); m];
        for i in self.nodes() {
            for arc in self.arcs(i) {
                rev[arc.to.0].push(i.0);
            }
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &rev[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Strong connectivity: node 0 reaches every node and every node reaches node 0.
    pub fn is_connected(&self) -> bool {
        self.distances_from(NodeId(0)).iter().all(Option::is_some) && self.reversed_reaches_all()
    }

    /// Largest shortest-path distance over all ordered node pairs.
    pub fn eccentricity_max(&self) -> Result<usize> {
        let mut diam = 0;
        for i in self.nodes() {
            for d in self.distances_from(i) {
                diam = diam.max(d.ok_or(Error::Disconnected)?);
            }
        }
        Ok(diam)
    }

    /// Line-oriented adjacency dump: `m`, then `i: j1 j2 ...` per node.
    pub fn to_adjacency_text(&self) -> String {
        let mut out = format!("{}\n", self.node_count());
        for i in self.nodes() {
            out.push_str(&format!("{i}:"));
            for arc in self.arcs(i) {
                out.push_str(&format!(" {}", arc.to));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`Graph::to_adjacency_text`].
    pub fn from_adjacency_text(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let m: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("node count: {e}")))?;
        let mut lists = vec![None; m];
        for line in lines {
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("missing ':' in {line:?}")))?;
            let i: usize = head
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("node id: {e}")))?;
            if i >= m {
                return Err(Error::NodeOutOfRange { node: i, nodes: m });
            }
            let succ = tail
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("successor: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            lists[i] = Some(succ);
        }
        let lists = lists
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| Error::Parse(format!("node {i} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_successors(name, lists)
    }
}
