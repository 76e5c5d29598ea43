use std::cmp::Ordering;
use std::collections::VecDeque;

use rayon::prelude::*;

use super::{Graph, GraphError, GraphFamily};

/// Largest `n` enumerated without an explicit override.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Subsets are 64-bit masks, so enumeration can never go beyond this.
pub const MAX_MASK_NODES: usize = 63;

/// A vertex set together with its boundary size; `boundary / size` is its
/// expansion ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheegerCut {
    pub boundary: usize,
    pub size: usize,
    /// Members of the set, ascending.
    pub members: Vec<usize>,
}

impl CheegerCut {
    pub fn value(&self) -> f64 {
        self.boundary as f64 / self.size as f64
    }

    fn from_mask(boundary: usize, size: usize, mask: u64) -> Self {
        let members = (0..64).filter(|&i| (mask >> i) & 1 == 1).collect();
        CheegerCut {
            boundary,
            size,
            members,
        }
    }
}

/// Best subset seen so far, ordered by exact ratio and then by mask.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    boundary: u64,
    size: u64,
    mask: u64,
}

impl Candidate {
    fn cmp_key(&self, other: &Candidate) -> Ordering {
        (self.boundary * other.size)
            .cmp(&(other.boundary * self.size))
            .then(self.mask.cmp(&other.mask))
    }

    fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if y.cmp_key(&x) == Ordering::Less { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

/// Exact Cheeger constant with the default size limit.
pub fn cheeger_exact(g: &Graph) -> Result<CheegerCut, GraphError> {
    cheeger_exact_with_limit(g, DEFAULT_ENUMERATION_LIMIT)
}

/// Exact Cheeger constant `min |E(S,S^c)| / |S|` over `1 <= |S| <= n/2`.
///
/// Every subset is visited in Gray-code order so each step updates the
/// boundary in O(1) from the neighbor bitmask of the flipped node. The mask
/// space is split into fixed prefix chunks scanned in parallel; ratios are
/// compared as exact fractions and ties go to the smallest mask, so the
/// result does not depend on scheduling.
pub fn cheeger_exact_with_limit(g: &Graph, limit: usize) -> Result<CheegerCut, GraphError> {
    let n = g.n();
    let limit = limit.min(MAX_MASK_NODES);
    if n > limit {
        return Err(GraphError::TooLarge { n, limit });
    }
    let adjacency: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | (1 << u)))
        .collect();
    let degrees: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();

    let high_bits = (n / 2).min(6);
    let low_bits = n - high_bits;
    let best = (0..1u64 << high_bits)
        .into_par_iter()
        .map(|prefix| scan_chunk(g, &adjacency, &degrees, low_bits, prefix << low_bits))
        .reduce(|| None, Candidate::better)
        .expect("n >= 2 always admits a singleton");
    Ok(CheegerCut::from_mask(
        best.boundary as usize,
        best.size as usize,
        best.mask,
    ))
}

fn scan_chunk(
    g: &Graph,
    adjacency: &[u64],
    degrees: &[u64],
    low_bits: usize,
    start: u64,
) -> Option<Candidate> {
    let half = (g.n() / 2) as u64;
    let mut set = start;
    let mut size = set.count_ones() as u64;
    let mut boundary = g.edge_boundary_mask(set) as u64;
    let mut best = None;
    let mut consider = |set: u64, size: u64, boundary: u64| {
        if size >= 1 && size <= half {
            let c = Candidate {
                boundary,
                size,
                mask: set,
            };
            best = Candidate::better(best, Some(c));
        }
    };
    consider(set, size, boundary);
    for step in 1..(1u64 << low_bits) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let inside = (adjacency[v] & set).count_ones() as u64;
        if set & bit == 0 {
            boundary = boundary + degrees[v] - 2 * inside;
            size += 1;
        } else {
            boundary = boundary + 2 * inside - degrees[v];
            size -= 1;
        }
        set ^= bit;
        consider(set, size, boundary);
    }
    best
}

/// Known values: `n/2` for complete graphs, `2/n` for chains of even
/// length and `1` for stars. Odd chains and expanders have no closed form.
pub fn cheeger_closed_form(family: &GraphFamily) -> Option<f64> {
    match *family {
        GraphFamily::Complete { n } => Some(n as f64 / 2.0),
        GraphFamily::Chain { n } if n % 2 == 0 => Some(2.0 / n as f64),
        GraphFamily::Star { .. } => Some(1.0),
        GraphFamily::Chain { .. } | GraphFamily::RegularExpander { .. } => None,
    }
}

/// Upper bound on the Cheeger constant for graphs too large to enumerate:
/// the best ratio among all singletons and all BFS-order prefixes (up to
/// `n/2` nodes) grown from each of the first few nodes. Deterministic.
pub fn cheeger_upper_bound(g: &Graph) -> CheegerCut {
    let n = g.n();
    let mut best: Option<CheegerCut> = None;
    let mut offer = |boundary: usize, members: &[usize]| {
        let size = members.len();
        let improves = match &best {
            None => true,
            Some(b) => boundary * b.size < b.boundary * size,
        };
        if improves {
            let mut members = members.to_vec();
            members.sort_unstable();
            best = Some(CheegerCut {
                boundary,
                size,
                members,
            });
        }
    };
    for v in 0..n {
        offer(g.degree(v), &[v]);
    }
    let half = n / 2;
    for root in 0..n.min(8) {
        let mut inside = vec![false; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        let mut order = Vec::with_capacity(half);
        let mut boundary = 0usize;
        while let Some(u) = queue.pop_front() {
            if order.len() == half {
                break;
            }
            let internal = g.neighbors(u).iter().filter(|&&w| inside[w]).count();
            boundary = boundary + g.degree(u) - 2 * internal;
            inside[u] = true;
            order.push(u);
            offer(boundary, &order);
            for &w in g.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    best.expect("graph has at least one node")
}
