//! Undirected connected graphs, the example families and their metrics.

mod cheeger;
mod family;
mod io;

use std::collections::VecDeque;

use serde::Serialize;

pub use cheeger::{
    cheeger_closed_form, cheeger_exact, cheeger_exact_with_limit, cheeger_upper_bound, CheegerCut,
    DEFAULT_ENUMERATION_LIMIT, MAX_MASK_NODES,
};
pub use family::{build_family, GraphFamily, EXPANDER_MAX_RETRIES};
pub use io::{parse_edge_list, write_edge_list};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid graph parameters: {0}")]
    InvalidParameters(String),
    #[error("could not build a connected simple {d}-regular graph on {n} nodes after {attempts} attempts")]
    ExpanderConstruction { n: usize, d: usize, attempts: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("graph is disconnected (node {unreachable} is not reachable from node 0)")]
    Disconnected { unreachable: usize },
    #[error("node index {index} out of range for a graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("graph has {n} nodes; exact enumeration is limited to {limit} (pass an override to go further)")]
    TooLarge { n: usize, limit: usize },
}

/// Simple undirected connected graph on nodes `0..n`.
///
/// Edges are stored once as `(i, j)` with `i < j`, sorted lexicographically.
/// Per-edge data elsewhere in the crate (observations, scores) is indexed by
/// position in [`Graph::edges`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    family: Option<GraphFamily>,
}

impl Graph {
    /// Validates and normalizes an edge list. Endpoint order within a pair
    /// does not matter.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n < 2 {
            return Err(GraphError::InvalidParameters(format!(
                "a graph needs at least 2 nodes, got {n}"
            )));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::NodeOutOfRange { index, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &normalized {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let graph = Graph {
            n,
            edges: normalized,
            adjacency,
            family: None,
        };
        if let Some(unreachable) = graph.first_unreachable() {
            return Err(GraphError::Disconnected { unreachable });
        }
        Ok(graph)
    }

    pub(crate) fn with_family(mut self, family: GraphFamily) -> Self {
        self.family = Some(family);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn delta_max(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The family this graph was generated from, if any.
    pub fn family(&self) -> Option<&GraphFamily> {
        self.family.as_ref()
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() == self.n - 1
    }

    /// Position of edge `{i, j}` in [`Graph::edges`].
    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i.min(j), i.max(j))).ok()
    }

    /// `|E(S, S^c)|`: the number of edges with exactly one endpoint in `s`.
    /// Repeated members of `s` are counted once.
    pub fn edge_boundary(&self, s: &[usize]) -> Result<usize, GraphError> {
        let mut member = vec![false; self.n];
        for &v in s {
            if v >= self.n {
                return Err(GraphError::NodeOutOfRange { index: v, n: self.n });
            }
            member[v] = true;
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(i, j)| member[i] != member[j])
            .count())
    }

    /// Bitmask form of [`Graph::edge_boundary`]; requires `n <= 64`.
    pub fn edge_boundary_mask(&self, mask: u64) -> usize {
        debug_assert!(self.n <= 64);
        self.edges
            .iter()
            .filter(|&&(i, j)| ((mask >> i) & 1) != ((mask >> j) & 1))
            .count()
    }

    /// BFS spanning tree from node 0, visiting neighbors in ascending order.
    pub fn spanning_tree(&self) -> Vec<(usize, usize)> {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        let mut tree = Vec::with_capacity(self.n - 1);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    tree.push((u.min(v), u.max(v)));
                    queue.push_back(v);
                }
            }
        }
        tree
    }

    /// Computes degrees and the Cheeger constant according to `policy`.
    pub fn metrics(&self, policy: &CheegerPolicy) -> Result<GraphMetrics, GraphError> {
        let (cheeger, cheeger_method) = if let Some(value) = policy.user_value {
            if !(value.is_finite() && value > 0.0) {
                return Err(GraphError::InvalidParameters(format!(
                    "user-supplied Cheeger constant must be positive, got {value}"
                )));
            }
            (value, CheegerMethod::UserSupplied)
        } else if let Some(value) = self.family.as_ref().and_then(cheeger_closed_form) {
            (value, CheegerMethod::ClosedForm)
        } else {
            let limit = if policy.allow_large {
                MAX_MASK_NODES
            } else {
                policy.enumeration_limit
            };
            match cheeger_exact_with_limit(self, limit) {
                Ok(cut) => (cut.value(), CheegerMethod::ExactEnumeration),
                Err(GraphError::TooLarge { .. }) if policy.upper_bound_fallback => {
                    (cheeger_upper_bound(self).value(), CheegerMethod::CutUpperBound)
                }
                Err(e) => return Err(e),
            }
        };
        let degrees = self.degrees();
        let delta_max = degrees.iter().copied().max().unwrap_or(0);
        Ok(GraphMetrics {
            degrees,
            delta_max,
            cheeger,
            cheeger_method,
        })
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().position(|&s| !s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheegerMethod {
    ExactEnumeration,
    ClosedForm,
    UserSupplied,
    /// Minimum ratio over a deterministic family of cuts. Only an upper bound
    /// on the true constant; used when the graph is too large to enumerate.
    CutUpperBound,
}

impl CheegerMethod {
    pub fn label(self) -> &'static str {
        match self {
            CheegerMethod::ExactEnumeration => "exact-enumeration",
            CheegerMethod::ClosedForm => "closed-form",
            CheegerMethod::UserSupplied => "user-supplied",
            CheegerMethod::CutUpperBound => "cut-upper-bound",
        }
    }
}

/// How [`Graph::metrics`] obtains the Cheeger constant.
///
/// Precedence: a user-supplied value, then the closed form of the graph's
/// family, then exact enumeration, then (if enabled) the cut upper bound.
#[derive(Debug, Clone, PartialEq)]
pub struct CheegerPolicy {
    pub enumeration_limit: usize,
    pub allow_large: bool,
    pub upper_bound_fallback: bool,
    pub user_value: Option<f64>,
}

impl Default for CheegerPolicy {
    fn default() -> Self {
        CheegerPolicy {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            allow_large: false,
            upper_bound_fallback: false,
            user_value: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub degrees: Vec<usize>,
    pub delta_max: usize,
    pub cheeger: f64,
    pub cheeger_method: CheegerMethod,
}
