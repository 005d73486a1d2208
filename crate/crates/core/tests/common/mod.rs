//! Brute-force reference implementations shared by the integration and
//! acceptance suites.
//!
//! Every function here favors an independent derivation over speed: the
//! clustering oracle enumerates all node triples, the path-length oracle
//! runs Floyd–Warshall on a dense matrix, and the connectivity oracle is a
//! union-find. None of them share code with the production metrics, so an
//! agreement between the two is evidence rather than tautology.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use netforge::graph::Graph;

/// Average local clustering coefficient by O(N³) triple enumeration.
///
/// For each node v, counts unordered neighbor pairs (u, w) that are
/// themselves adjacent by scanning **all** node pairs, then averages
/// 2·tri(v) / (d(v)·(d(v)−1)) over every node, with degree < 2
/// contributing zero.
pub fn oracle_cc(g: &Graph) -> f64 {
    let n = g.n_nodes();
    if n == 0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for v in 0..n as u32 {
        let d = g.degree(v);
        if d < 2 {
            continue;
        }
        let mut closed = 0u64;
        for u in 0..n as u32 {
            for w in (u + 1)..n as u32 {
                if g.has_edge(v, u) && g.has_edge(v, w) && g.has_edge(u, w) {
                    closed += 1;
                }
            }
        }
        sum += 2.0 * closed as f64 / (d as f64 * (d as f64 - 1.0));
    }
    sum / n as f64
}

/// Mean shortest path length by Floyd–Warshall.
///
/// Returns `None` when some pair is unreachable (or when n < 2, where the
/// mean over pairs is undefined); otherwise the average over unordered
/// pairs of distinct nodes.
pub fn oracle_apl(g: &Graph) -> Option<f64> {
    let n = g.n_nodes();
    if n < 2 {
        return None;
    }
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![INF; n * n];
    for v in 0..n {
        dist[v * n + v] = 0;
    }
    for &(u, v) in g.edges() {
        dist[u as usize * n + v as usize] = 1;
        dist[v as usize * n + u as usize] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let through = dik + dist[k * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                }
            }
        }
    }
    let mut sum = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j];
            if d >= INF {
                return None;
            }
            sum += d;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Some(sum as f64 / pairs)
}

/// Connectivity by union-find with path halving.
pub fn oracle_connected(g: &Graph) -> bool {
    let n = g.n_nodes();
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(u, v) in g.edges() {
        let (ru, rv) = (find(&mut parent, u as usize), find(&mut parent, v as usize));
        if ru != rv {
            parent[ru] = rv;
            components -= 1;
        }
    }
    components == 1
}

/// Uniform random simple graph with exactly `m` edges (not necessarily
/// connected): a partial shuffle of the full pair list.
pub fn random_graph(n: usize, m: usize, rng: &mut StdRng) -> Graph {
    let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            pairs.push((u, v));
        }
    }
    assert!(m <= pairs.len(), "m={m} exceeds max edges for n={n}");
    let (chosen, _) = pairs.partial_shuffle(rng, m);
    Graph::from_edges(n, chosen).expect("shuffled pairs are distinct and in range")
}

/// Random (n, m) with n in [2, n_max] and any feasible edge count,
/// so the sample mixes empty, sparse, dense, and complete graphs.
pub fn random_graph_any(n_max: usize, rng: &mut StdRng) -> Graph {
    let n = rng.random_range(2..=n_max);
    let max_m = n * (n - 1) / 2;
    let m = rng.random_range(0..=max_m);
    random_graph(n, m, rng)
}

/// Every labeled simple graph on `n` nodes, one per subset of the
/// \binom{n}{2} possible edges. Usable up to n = 6 (32768 graphs).
pub fn all_graphs(n: usize) -> Vec<Graph> {
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            pairs.push((u, v));
        }
    }
    assert!(
        pairs.len() <= 20,
        "enumeration over 2^{} subsets",
        pairs.len()
    );
    let mut out = Vec::with_capacity(1 << pairs.len());
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        out.push(Graph::from_edges(n, &edges).expect("subset edges are valid"));
    }
    out
}
