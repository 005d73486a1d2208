//! Undirected simple graph over labeled nodes `0..N-1`.
//!
//! The representation keeps three views in lockstep: adjacency lists for
//! neighborhood scans, a flat edge list for uniform edge sampling, and a
//! hash index for O(1) membership tests. Degrees are adjacency-list lengths,
//! so the degree cache can never go stale.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Retry cap for rejection-sampled non-edges. Dense graphs outside the
/// intended sparse regime can exhaust this; the caller gets an explicit
/// error instead of a silent stall.
const REJECTION_CAP: usize = 1_000_000;

/// Errors from graph construction and mutation.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphError {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// Attempt to insert an edge that is already present.
    DuplicateEdge(u32, u32),
    /// Attempt to remove or rely on an edge that is absent.
    MissingEdge(u32, u32),
    /// Attempt to create an edge from a node to itself.
    SelfLoop(u32),
    /// The graph is complete or empty, so no rewire move exists.
    NoMoveAvailable,
    /// Rejection sampling failed to find a non-edge within the retry cap.
    SamplingExhausted,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            GraphError::DuplicateEdge(u, v) => write!(f, "edge {{{u}, {v}}} already exists"),
            GraphError::MissingEdge(u, v) => write!(f, "edge {{{u}, {v}}} does not exist"),
            GraphError::SelfLoop(u) => write!(f, "self-loop at node {u} is not allowed"),
            GraphError::NoMoveAvailable => {
                write!(f, "graph is complete or empty; no rewire move exists")
            }
            GraphError::SamplingExhausted => write!(
                f,
                "failed to sample a non-edge within {REJECTION_CAP} attempts"
            ),
        }
    }
}

impl std::error::Error for GraphError {}

/// A single rewire step: delete one existing edge, insert one non-edge.
///
/// Both pairs are stored with the smaller node first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewireMove {
    /// Edge deleted by the move.
    pub removed: (u32, u32),
    /// Edge inserted by the move.
    pub added: (u32, u32),
}

impl RewireMove {
    /// Builds a move, normalizing both pairs to (smaller, larger).
    pub fn new(removed: (u32, u32), added: (u32, u32)) -> Self {
        RewireMove {
            removed: ordered(removed.0, removed.1),
            added: ordered(added.0, added.1),
        }
    }

    /// The move that undoes this one.
    pub fn inverted(&self) -> Self {
        RewireMove {
            removed: self.added,
            added: self.removed,
        }
    }
}

fn ordered(u: u32, v: u32) -> (u32, u32) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

fn edge_key(u: u32, v: u32) -> u64 {
    let (a, b) = ordered(u, v);
    (u64::from(a) << 32) | u64::from(b)
}

/// Undirected simple graph with O(1) edge membership and uniform edge
/// sampling.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
    edge_index: HashMap<u64, usize>,
}

impl Graph {
    /// Edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidParameter(
                "graph needs at least one node".into(),
            ));
        }
        Ok(Graph {
            n,
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            edge_index: HashMap::new(),
        })
    }

    /// Graph assembled from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of node pairs, i.e. the edge count of the complete graph.
    pub fn max_edges(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn degree(&self, node: u32) -> usize {
        self.adj[node as usize].len()
    }

    /// Neighbor list of `node`, in no particular order.
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.adj[node as usize]
    }

    /// Current edges as (smaller, larger) pairs, in no particular order.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edge_index.contains_key(&edge_key(u, v))
    }

    fn check_node(&self, u: u32) -> Result<(), GraphError> {
        if (u as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::InvalidParameter(format!(
                "node {u} out of range for a {}-node graph",
                self.n
            )))
        }
    }

    /// Inserts edge {u, v}.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            let (a, b) = ordered(u, v);
            return Err(GraphError::DuplicateEdge(a, b));
        }
        let (a, b) = ordered(u, v);
        self.edge_index.insert(edge_key(a, b), self.edges.len());
        self.edges.push((a, b));
        self.adj[a as usize].push(b);
        self.adj[b as usize].push(a);
        Ok(())
    }

    /// Deletes edge {u, v}.
    pub fn remove_edge(&mut self, u: u32, v: u32) -> Result<(), GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        let (a, b) = ordered(u, v);
        let idx = self
            .edge_index
            .remove(&edge_key(a, b))
            .ok_or(GraphError::MissingEdge(a, b))?;
        self.edges.swap_remove(idx);
        if idx < self.edges.len() {
            let moved = self.edges[idx];
            self.edge_index.insert(edge_key(moved.0, moved.1), idx);
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = &mut self.adj[x as usize];
            let pos = list
                .iter()
                .position(|&w| w == y)
                .expect("adjacency matches edge index");
            list.swap_remove(pos);
        }
        Ok(())
    }

    /// Installs a rewire move. The graph is untouched when this errors.
    pub fn apply(&mut self, m: &RewireMove) -> Result<(), GraphError> {
        let (ru, rv) = m.removed;
        let (au, av) = m.added;
        self.check_node(ru)?;
        self.check_node(rv)?;
        self.check_node(au)?;
        self.check_node(av)?;
        if au == av {
            return Err(GraphError::SelfLoop(au));
        }
        if !self.has_edge(ru, rv) {
            return Err(GraphError::MissingEdge(ru, rv));
        }
        if self.has_edge(au, av) {
            return Err(GraphError::DuplicateEdge(au, av));
        }
        self.remove_edge(ru, rv)?;
        self.add_edge(au, av)?;
        Ok(())
    }

    /// Undoes a move previously installed by [`Graph::apply`].
    pub fn revert(&mut self, m: &RewireMove) -> Result<(), GraphError> {
        self.apply(&m.inverted())
    }

    /// Uniformly random existing edge.
    pub fn random_edge(&self, rng: &mut impl Rng) -> Option<(u32, u32)> {
        if self.edges.is_empty() {
            None
        } else {
            Some(self.edges[rng.random_range(0..self.edges.len())])
        }
    }

    /// Uniformly random non-edge, by rejection over node pairs.
    pub fn random_non_edge(&self, rng: &mut impl Rng) -> Result<(u32, u32), GraphError> {
        if self.n_edges() == self.max_edges() {
            return Err(GraphError::NoMoveAvailable);
        }
        let n = self.n as u32;
        for _ in 0..REJECTION_CAP {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && !self.has_edge(u, v) {
                return Ok(ordered(u, v));
            }
        }
        Err(GraphError::SamplingExhausted)
    }
}

impl PartialEq for Graph {
    /// Structural equality: same node count and same edge set.
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.edges.len() != other.edges.len() {
            return false;
        }
        self.edges.iter().all(|&(u, v)| other.has_edge(u, v))
    }
}

/// Connected simple graph with exactly `n_edges` edges: a random-permutation
/// attachment tree plus uniformly sampled extra non-edges.
pub fn random_connected_graph(
    n_nodes: usize,
    n_edges: usize,
    rng_seed: u64,
) -> Result<Graph, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    random_connected_graph_from(n_nodes, n_edges, &mut rng)
}

/// As [`random_connected_graph`], drawing from a caller-supplied generator.
pub fn random_connected_graph_from(
    n_nodes: usize,
    n_edges: usize,
    rng: &mut impl Rng,
) -> Result<Graph, GraphError> {
    let mut g = Graph::empty(n_nodes)?;
    if n_edges + 1 < n_nodes {
        return Err(GraphError::InvalidParameter(format!(
            "{n_edges} edges cannot connect {n_nodes} nodes (need at least {})",
            n_nodes - 1
        )));
    }
    if n_edges > g.max_edges() {
        return Err(GraphError::InvalidParameter(format!(
            "{n_edges} edges exceed the {} possible on {n_nodes} nodes",
            g.max_edges()
        )));
    }

    // Spanning tree: visit nodes in a random order, attaching each new node
    // to a uniformly chosen earlier one.
    let mut order: Vec<u32> = (0..n_nodes as u32).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for i in 1..order.len() {
        let parent = order[rng.random_range(0..i)];
        g.add_edge(order[i], parent)?;
    }

    while g.n_edges() < n_edges {
        let (u, v) = g.random_non_edge(rng)?;
        g.add_edge(u, v)?;
    }
    Ok(g)
}

/// Uniformly random rewire proposal: edge to delete × non-edge to insert.
///
/// The graph itself is not modified.
pub fn propose_rewire(g: &Graph, rng: &mut impl Rng) -> Result<RewireMove, GraphError> {
    if g.n_edges() == 0 || g.n_edges() == g.max_edges() {
        return Err(GraphError::NoMoveAvailable);
    }
    let removed = g.random_edge(rng).expect("edge count checked above");
    let added = g.random_non_edge(rng)?;
    Ok(RewireMove { removed, added })
}

/// Errors from reading the edge-list text format.
#[derive(Debug)]
pub enum EdgeListError {
    /// Underlying I/O failure.
    Io(io::Error),
    /// Malformed content, with the 1-based line number.
    Parse { line: usize, msg: String },
}

impl fmt::Display for EdgeListError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeListError::Io(err) => write!(f, "edge list I/O error: {err}"),
            EdgeListError::Parse { line, msg } => write!(f, "edge list line {line}: {msg}"),
        }
    }
}

impl std::error::Error for EdgeListError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            EdgeListError::Io(err) => Some(err),
            EdgeListError::Parse { .. } => None,
        }
    }
}

impl From<io::Error> for EdgeListError {
    fn from(err: io::Error) -> Self {
        EdgeListError::Io(err)
    }
}

/// Writes the graph in edge-list text form: a `# nodes=N edges=E` header,
/// then one `u v` line per edge with `u < v`, sorted by (u, v).
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> io::Result<()> {
    writeln!(out, "# nodes={} edges={}", g.n_nodes(), g.n_edges())?;
    let mut sorted = g.edges().to_vec();
    sorted.sort_unstable();
    for (u, v) in sorted {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

/// Parses the format produced by [`write_edge_list`].
pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, EdgeListError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or(EdgeListError::Parse {
        line: 1,
        msg: "missing header".into(),
    })??;
    let (n_nodes, n_edges) = parse_header(&header).ok_or_else(|| EdgeListError::Parse {
        line: 1,
        msg: format!("expected '# nodes=N edges=E', got '{header}'"),
    })?;
    let mut g = Graph::empty(n_nodes).map_err(|err| EdgeListError::Parse {
        line: 1,
        msg: err.to_string(),
    })?;
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let mut parts = text.split_whitespace();
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(v), None) => {
                let u: u32 = u.parse().map_err(|_| EdgeListError::Parse {
                    line: line_no,
                    msg: format!("invalid node id '{u}'"),
                })?;
                let v: u32 = v.parse().map_err(|_| EdgeListError::Parse {
                    line: line_no,
                    msg: format!("invalid node id '{v}'"),
                })?;
                (u, v)
            }
            _ => {
                return Err(EdgeListError::Parse {
                    line: line_no,
                    msg: format!("expected 'u v', got '{text}'"),
                })
            }
        };
        if u >= v {
            return Err(EdgeListError::Parse {
                line: line_no,
                msg: format!("edge endpoints must satisfy u < v, got {u} {v}"),
            });
        }
        g.add_edge(u, v).map_err(|err| EdgeListError::Parse {
            line: line_no,
            msg: err.to_string(),
        })?;
    }
    if g.n_edges() != n_edges {
        return Err(EdgeListError::Parse {
            line: 1,
            msg: format!(
                "header declares {n_edges} edges but {} were listed",
                g.n_edges()
            ),
        });
    }
    Ok(g)
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let rest = line.strip_prefix('#')?.trim();
    let mut parts = rest.split_whitespace();
    let nodes = parts.next()?.strip_prefix("nodes=")?.parse().ok()?;
    let edges = parts.next()?.strip_prefix("edges=")?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((nodes, edges))
}
