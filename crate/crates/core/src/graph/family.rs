use std::collections::HashSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};

/// Upper limit on rejected pairings before expander generation gives up.
pub const EXPANDER_MAX_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamily {
    Complete { n: usize },
    Chain { n: usize },
    /// Node 0 is the internal node.
    Star { n: usize },
    /// Random simple connected `d`-regular graph, reproducible from `seed`.
    RegularExpander { n: usize, d: usize, seed: u64 },
}

impl GraphFamily {
    pub fn n(&self) -> usize {
        match *self {
            GraphFamily::Complete { n }
            | GraphFamily::Chain { n }
            | GraphFamily::Star { n }
            | GraphFamily::RegularExpander { n, .. } => n,
        }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let invalid = |msg: String| Err(GraphError::InvalidParameters(msg));
        match *self {
            GraphFamily::Complete { n } | GraphFamily::Chain { n } | GraphFamily::Star { n }
                if n < 2 =>
            {
                invalid(format!("{self} needs n >= 2"))
            }
            GraphFamily::RegularExpander { n, d, .. } => {
                if d < 2 {
                    invalid(format!("{self}: degree must be at least 2"))
                } else if d >= n {
                    invalid(format!("{self}: degree must be below n"))
                } else if (n * d) % 2 == 1 {
                    invalid(format!("{self}: n*d must be even"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphFamily::Complete { n } => write!(f, "complete n={n}"),
            GraphFamily::Chain { n } => write!(f, "chain n={n}"),
            GraphFamily::Star { n } => write!(f, "star n={n}"),
            GraphFamily::RegularExpander { n, d, seed } => {
                write!(f, "regular-expander n={n} d={d} seed={seed}")
            }
        }
    }
}

pub fn build_family(family: &GraphFamily) -> Result<Graph, GraphError> {
    family.validate()?;
    let graph = match *family {
        GraphFamily::Complete { n } => {
            Graph::new(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))))?
        }
        GraphFamily::Chain { n } => Graph::new(n, (1..n).map(|i| (i - 1, i)))?,
        GraphFamily::Star { n } => Graph::new(n, (1..n).map(|i| (0, i)))?,
        GraphFamily::RegularExpander { n, d, seed } => random_regular(n, d, seed)?,
    };
    Ok(graph.with_family(*family))
}

/// Dense degrees are produced as the complement of a sparse regular graph,
/// which keeps the pairing step in the regime where it rarely gets stuck.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let complement = 2 * d > n - 1;
    let sparse_degree = if complement { n - 1 - d } else { d };

    for _ in 0..EXPANDER_MAX_RETRIES {
        let Some(sparse) = pair_stubs(n, sparse_degree, &mut rng) else {
            continue;
        };
        let edges: Vec<(usize, usize)> = if complement {
            let present: HashSet<(usize, usize)> = sparse.into_iter().collect();
            (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|e| !present.contains(e))
                .collect()
        } else {
            sparse
        };
        match Graph::new(n, edges) {
            Ok(g) => return Ok(g),
            Err(GraphError::Disconnected { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(GraphError::ExpanderConstruction {
        n,
        d,
        attempts: EXPANDER_MAX_RETRIES,
    })
}

/// Pairing model with incremental rejection: repeatedly joins two random
/// free stubs on distinct, not-yet-adjacent nodes. Returns `None` when the
/// remaining stubs admit no valid pair.
fn pair_stubs<R: Rng>(n: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut edges = HashSet::with_capacity(n * d / 2);
    let mut out = Vec::with_capacity(n * d / 2);
    while !stubs.is_empty() {
        let len = stubs.len();
        let mut chosen = None;
        for _ in 0..(16 * len).max(64) {
            let a = rng.random_range(0..len);
            let b = rng.random_range(0..len);
            if valid_pair(&stubs, &edges, a, b) {
                chosen = Some((a, b));
                break;
            }
        }
        if chosen.is_none() {
            // Exhaustive check before declaring the attempt stuck.
            let pairs: Vec<(usize, usize)> = (0..len)
                .flat_map(|a| ((a + 1)..len).map(move |b| (a, b)))
                .filter(|&(a, b)| valid_pair(&stubs, &edges, a, b))
                .collect();
            if pairs.is_empty() {
                return None;
            }
            chosen = Some(pairs[rng.random_range(0..pairs.len())]);
        }
        let (a, b) = chosen?;
        let (u, v) = (stubs[a], stubs[b]);
        let edge = (u.min(v), u.max(v));
        edges.insert(edge);
        out.push(edge);
        stubs.swap_remove(a.max(b));
        stubs.swap_remove(a.min(b));
    }
    Some(out)
}

fn valid_pair(stubs: &[usize], edges: &HashSet<(usize, usize)>, a: usize, b: usize) -> bool {
    let (u, v) = (stubs[a], stubs[b]);
    a != b && u != v && !edges.contains(&(u.min(v), u.max(v)))
}
