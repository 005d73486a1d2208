//! Exact trait metrics: connectivity, average local clustering coefficient,
//! and average shortest path length.
//!
//! Clustering is the average local (per-node) coefficient with degree-<2
//! nodes contributing 0. [`TriangleCounts`] maintains exact integer triangle
//! counts across rewires, so the incrementally maintained coefficient is
//! bit-identical to a fresh recompute — there is no drift to bound.

use std::collections::HashMap;
use std::fmt;

use crate::graph::{Graph, RewireMove};

/// Errors from metric evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    /// Average shortest path is undefined when some pair has no path.
    Disconnected,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::Disconnected => {
                write!(
                    f,
                    "graph is disconnected; average shortest path is undefined"
                )
            }
        }
    }
}

impl std::error::Error for MetricsError {}

/// True iff a breadth-first traversal from node 0 reaches every node.
pub fn is_connected(g: &Graph) -> bool {
    let n = g.n_nodes();
    let mut seen = vec![false; n];
    let mut queue: Vec<u32> = Vec::with_capacity(n);
    seen[0] = true;
    queue.push(0);
    let mut head = 0;
    let mut reached = 1;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &w in g.neighbors(u) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                reached += 1;
                queue.push(w);
            }
        }
    }
    reached == n
}

/// Local clustering value for one node: triangles over possible neighbor
/// pairs, 0 for degrees below 2.
pub fn local_cc(triangles: i64, degree: usize) -> f64 {
    if degree < 2 {
        return 0.0;
    }
    let pairs = (degree * (degree - 1) / 2) as f64;
    triangles as f64 / pairs
}

/// Nodes adjacent to both `u` and `v`.
pub fn common_neighbors(g: &Graph, u: u32, v: u32) -> Vec<u32> {
    let (a, b) = if g.degree(u) <= g.degree(v) {
        (u, v)
    } else {
        (v, u)
    };
    g.neighbors(a)
        .iter()
        .copied()
        .filter(|&w| w != b && g.has_edge(w, b))
        .collect()
}

/// Number of triangles through `node`.
pub fn node_triangles(g: &Graph, node: u32) -> i64 {
    let nb = g.neighbors(node);
    let mut count = 0;
    for i in 0..nb.len() {
        for j in (i + 1)..nb.len() {
            if g.has_edge(nb[i], nb[j]) {
                count += 1;
            }
        }
    }
    count
}

/// Exact per-node triangle counts, maintained across rewires.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleCounts {
    tri: Vec<i64>,
}

impl TriangleCounts {
    /// Counts from scratch: each edge charges its common neighbors once,
    /// so every triangle increments each of its three corners exactly once.
    pub fn new(g: &Graph) -> Self {
        let mut tri = vec![0i64; g.n_nodes()];
        for &(u, v) in g.edges() {
            for w in common_neighbors(g, u, v) {
                tri[w as usize] += 1;
            }
        }
        TriangleCounts { tri }
    }

    /// Per-node triangle counts, indexed by node.
    pub fn counts(&self) -> &[i64] {
        &self.tri
    }

    /// Adds per-node deltas produced by [`rewire_tri_deltas`].
    pub fn apply_deltas(&mut self, deltas: &[(u32, i64)]) {
        for &(node, d) in deltas {
            self.tri[node as usize] += d;
        }
    }

    /// Subtracts per-node deltas, undoing [`TriangleCounts::apply_deltas`].
    pub fn revert_deltas(&mut self, deltas: &[(u32, i64)]) {
        for &(node, d) in deltas {
            self.tri[node as usize] -= d;
        }
    }

    /// Average local clustering coefficient, summed in node order. `g` must
    /// be the graph state these counts describe.
    pub fn average_local(&self, g: &Graph) -> f64 {
        let mut sum = 0.0;
        for (i, &t) in self.tri.iter().enumerate() {
            sum += local_cc(t, g.degree(i as u32));
        }
        sum / g.n_nodes() as f64
    }
}

/// Average local clustering coefficient of the whole graph.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    TriangleCounts::new(g).average_local(g)
}

/// Per-node triangle-count changes a rewire would cause. `g` must be in the
/// move's pre-state (removed edge present, added edge absent).
pub fn rewire_tri_deltas(g: &Graph, m: &RewireMove) -> Vec<(u32, i64)> {
    let (a, b) = m.removed;
    let (c, d) = m.added;
    let uses_removed = |x: u32, y: u32| (x.min(y), x.max(y)) == (a, b);
    let mut acc: HashMap<u32, i64> = HashMap::new();

    let lost = common_neighbors(g, a, b);
    for &w in &lost {
        *acc.entry(w).or_insert(0) -= 1;
    }
    *acc.entry(a).or_insert(0) -= lost.len() as i64;
    *acc.entry(b).or_insert(0) -= lost.len() as i64;

    // Triangles gained at the added edge, skipping any that would need the
    // edge this same move removes.
    let mut gained = 0i64;
    for w in common_neighbors(g, c, d) {
        if uses_removed(w, c) || uses_removed(w, d) {
            continue;
        }
        *acc.entry(w).or_insert(0) += 1;
        gained += 1;
    }
    *acc.entry(c).or_insert(0) += gained;
    *acc.entry(d).or_insert(0) += gained;

    acc.into_iter().filter(|&(_, delta)| delta != 0).collect()
}

/// Change in [`clustering_coefficient`] a rewire would cause, evaluated
/// from the affected nodes alone. `g` must be in the move's pre-state.
pub fn cc_delta(g: &Graph, m: &RewireMove) -> f64 {
    let mut changes: HashMap<u32, (i64, i64)> = HashMap::new();
    for (node, dtri) in rewire_tri_deltas(g, m) {
        changes.entry(node).or_insert((0, 0)).0 = dtri;
    }
    for node in [m.removed.0, m.removed.1] {
        changes.entry(node).or_insert((0, 0)).1 -= 1;
    }
    for node in [m.added.0, m.added.1] {
        changes.entry(node).or_insert((0, 0)).1 += 1;
    }

    let mut delta = 0.0;
    for (&node, &(dtri, ddeg)) in &changes {
        let tri = node_triangles(g, node);
        let deg = g.degree(node);
        let new_deg = (deg as i64 + ddeg) as usize;
        delta += local_cc(tri + dtri, new_deg) - local_cc(tri, deg);
    }
    delta / g.n_nodes() as f64
}

/// Mean shortest-path length over all unordered node pairs, by one
/// breadth-first sweep per source. A single-node graph has no pairs and
/// returns 0.
pub fn average_shortest_path(g: &Graph) -> Result<f64, MetricsError> {
    let n = g.n_nodes();
    if n < 2 {
        return Ok(0.0);
    }
    let mut dist: Vec<u32> = vec![u32::MAX; n];
    let mut queue: Vec<u32> = Vec::with_capacity(n);
    let mut total: u64 = 0;
    for src in 0..n as u32 {
        dist.fill(u32::MAX);
        queue.clear();
        dist[src as usize] = 0;
        queue.push(src);
        let mut head = 0;
        let mut reached = 1;
        let mut sum: u64 = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let du = dist[u as usize];
            sum += u64::from(du);
            for &w in g.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = du + 1;
                    reached += 1;
                    queue.push(w);
                }
            }
        }
        if reached < n {
            return Err(MetricsError::Disconnected);
        }
        total += sum;
    }
    // Every unordered pair contributes twice to `total`.
    Ok(total as f64 / (n * (n - 1)) as f64)
}
