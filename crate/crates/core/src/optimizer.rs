//! Strict hill climber over single-edge rewires.
//!
//! Each step proposes one rewire, discards it outright if it disconnects
//! the graph (such proposals consume no iteration by default), and accepts
//! it only when the penalty objective strictly decreases. The multiset
//! degree mismatch is maintained through an exact integer degree-count
//! table and clustering through integer triangle counts, so the
//! incrementally maintained objective is bit-identical to a from-scratch
//! evaluation at every step.

use std::fmt;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{propose_rewire, random_connected_graph_from, Graph, GraphError, RewireMove};
use crate::metrics::{
    average_shortest_path, clustering_coefficient, is_connected, rewire_tri_deltas, TriangleCounts,
};
use crate::objective::{
    degree_counts, degree_mismatch_sum, evaluate, mismatch_from_degree_counts, target_prefix_sums,
    Evaluation, ObjectiveError, ObjectiveSpec,
};

/// Errors from an optimization run.
#[derive(Debug)]
pub enum OptimizerError {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// Graph construction or mutation failed.
    Graph(GraphError),
    /// Objective evaluation failed.
    Objective(ObjectiveError),
}

impl fmt::Display for OptimizerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OptimizerError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            OptimizerError::Graph(err) => write!(f, "graph error: {err}"),
            OptimizerError::Objective(err) => write!(f, "objective error: {err}"),
        }
    }
}

impl std::error::Error for OptimizerError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            OptimizerError::InvalidParameter(_) => None,
            OptimizerError::Graph(err) => Some(err),
            OptimizerError::Objective(err) => Some(err),
        }
    }
}

impl From<GraphError> for OptimizerError {
    fn from(err: GraphError) -> Self {
        OptimizerError::Graph(err)
    }
}

impl From<ObjectiveError> for OptimizerError {
    fn from(err: ObjectiveError) -> Self {
        OptimizerError::Objective(err)
    }
}

/// Knobs of one optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Number of evaluated (connected) proposals to process.
    pub iterations: u64,
    /// Seed for the run's private generator.
    pub rng_seed: u64,
    /// Hard cap on total proposals including disconnected ones;
    /// `None` means 10 × `iterations`.
    pub max_proposals: Option<u64>,
    /// Maintain clustering through the incremental triangle tracker
    /// (`true`) or recompute it from scratch per evaluation (`false`).
    /// Both modes produce bit-identical decisions.
    pub incremental_cc: bool,
    /// Count disconnected proposals toward `iterations` as well. Off by
    /// default; kept as a switch so the alternative reading of the step
    /// budget can be compared.
    pub count_disconnected: bool,
}

impl OptimizerConfig {
    /// Standard configuration: 100000 iterations, incremental clustering.
    pub fn new(rng_seed: u64) -> Self {
        OptimizerConfig {
            iterations: 100_000,
            rng_seed,
            max_proposals: None,
            incremental_cc: true,
            count_disconnected: false,
        }
    }

    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.iterations == 0 {
            return Err(OptimizerError::InvalidParameter(
                "iterations must be at least 1".into(),
            ));
        }
        if let Some(cap) = self.max_proposals {
            if cap < self.iterations {
                return Err(OptimizerError::InvalidParameter(format!(
                    "max_proposals ({cap}) must be at least iterations ({})",
                    self.iterations
                )));
            }
        }
        Ok(())
    }

    fn proposal_cap(&self) -> u64 {
        self.max_proposals
            .unwrap_or_else(|| self.iterations.saturating_mul(10))
    }
}

/// Objective value recorded at one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    /// Iteration counter at acceptance; 0 is the initial state.
    pub iteration: u64,
    pub eval: Evaluation,
}

/// Everything a finished run reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub final_graph: Graph,
    /// Fresh full evaluation of the final graph.
    pub final_eval: Evaluation,
    /// Accepted (strictly improving) moves.
    pub accepted_count: u64,
    /// Proposals discarded for disconnecting the graph.
    pub rejected_disconnected_count: u64,
    /// Connected proposals evaluated — the iteration counter.
    pub evaluated_count: u64,
    /// All proposals drawn, including disconnected ones.
    pub proposal_count: u64,
    /// Initial state plus every accepted step; totals strictly decrease.
    pub trace: Vec<TracePoint>,
    /// Seed the run was started with.
    pub seed: u64,
    /// True when `max_proposals` stopped the run before `iterations`.
    pub budget_exhausted: bool,
    /// True when no rewire move existed (complete or single-edge graphs).
    pub move_space_exhausted: bool,
}

/// The nodes a rewire touches, deduplicated, with their current degrees.
/// Snapshot before `apply` and the entries read (node, pre-degree); read
/// again after and the degrees are the post-state — which is all the
/// degree-count table needs to stay current in either direction.
fn affected_nodes(g: &Graph, m: &RewireMove) -> Vec<(u32, usize)> {
    let nodes = [m.removed.0, m.removed.1, m.added.0, m.added.1];
    let mut out = Vec::with_capacity(4);
    for (i, &x) in nodes.iter().enumerate() {
        if !nodes[..i].contains(&x) {
            out.push((x, g.degree(x)));
        }
    }
    out
}

/// Runs the hill climber to completion.
///
/// The run initializes a random connected graph with exactly the target
/// edge budget, then processes `cfg.iterations` connected proposals,
/// accepting each only on a strict objective decrease. Identical inputs
/// (including the seed) give identical results.
pub fn run(obj: &ObjectiveSpec, cfg: &OptimizerConfig) -> Result<RunResult, OptimizerError> {
    run_observed(obj, cfg, |_, _| {})
}

/// As [`run`], invoking `observer` with the graph after every accepted
/// step. This is the instrumentation seam used by invariant tests; the
/// observer cannot influence the run.
pub fn run_observed(
    obj: &ObjectiveSpec,
    cfg: &OptimizerConfig,
    mut observer: impl FnMut(&Graph, &TracePoint),
) -> Result<RunResult, OptimizerError> {
    cfg.validate()?;
    obj.validate()?;
    let n = obj.targets.n_nodes();
    let e = obj.targets.edge_budget();
    if e + 1 < n || e > n * (n - 1) / 2 {
        return Err(OptimizerError::InvalidParameter(format!(
            "edge budget {e} is infeasible for a connected simple graph on {n} nodes"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut g = random_connected_graph_from(n, e, &mut rng)?;

    let cc_active = obj.cc_target.is_some();
    let apl_active = obj.apl_target.is_some();
    let mut tracker = (cc_active && cfg.incremental_cc).then(|| TriangleCounts::new(&g));

    // The degree term is maintained through a degree-count table and the
    // target prefix sums: exact integers, O(max degree) per proposal.
    let degree_sum = degree_mismatch_sum(&g, &obj.targets)?;
    let mut cnt = degree_counts(&g);
    let (tprefix, tprefix_sq) = target_prefix_sums(obj.targets.targets());
    debug_assert_eq!(
        degree_sum,
        mismatch_from_degree_counts(&cnt, &tprefix, &tprefix_sq)
    );
    let initial_cc = cc_active.then(|| clustering_coefficient(&g));
    let initial_apl = match apl_active {
        true => Some(average_shortest_path(&g).map_err(|_| ObjectiveError::Disconnected)?),
        false => None,
    };
    let mut current = obj.evaluation_from_parts(degree_sum, initial_cc, initial_apl);

    let mut trace = vec![TracePoint {
        iteration: 0,
        eval: current,
    }];
    let mut evaluated: u64 = 0;
    let mut proposals: u64 = 0;
    let mut accepted: u64 = 0;
    let mut rejected_disconnected: u64 = 0;
    let mut budget_exhausted = false;
    let mut move_space_exhausted = false;
    let cap = cfg.proposal_cap();

    while evaluated < cfg.iterations {
        if proposals >= cap {
            budget_exhausted = true;
            break;
        }
        let m = match propose_rewire(&g, &mut rng) {
            Ok(m) => m,
            Err(GraphError::NoMoveAvailable) => {
                move_space_exhausted = true;
                break;
            }
            Err(err) => return Err(err.into()),
        };
        proposals += 1;

        let tri_deltas = match &tracker {
            Some(_) => rewire_tri_deltas(&g, &m),
            None => Vec::new(),
        };
        let touched = affected_nodes(&g, &m);
        g.apply(&m)?;
        for &(x, pre) in &touched {
            cnt[pre] -= 1;
            cnt[g.degree(x)] += 1;
        }

        // Connectivity gate: disconnecting proposals are discarded before
        // they consume an iteration.
        if !is_connected(&g) {
            for &(x, pre) in &touched {
                cnt[g.degree(x)] -= 1;
                cnt[pre] += 1;
            }
            g.revert(&m)?;
            rejected_disconnected += 1;
            if cfg.count_disconnected {
                evaluated += 1;
            }
            continue;
        }
        evaluated += 1;

        let new_cc = match (cc_active, tracker.as_mut()) {
            (true, Some(t)) => {
                t.apply_deltas(&tri_deltas);
                Some(t.average_local(&g))
            }
            (true, None) => Some(clustering_coefficient(&g)),
            (false, _) => None,
        };

        let new_degree_sum = mismatch_from_degree_counts(&cnt, &tprefix, &tprefix_sq);

        // Every term is nonnegative, so once the degree and clustering
        // terms alone reach the incumbent total the proposal cannot be a
        // strict improvement; the all-pairs path sweep — by far the most
        // expensive measurement — runs only on proposals still in play.
        let partial = obj.evaluation_from_parts(new_degree_sum, new_cc, None);
        let candidate = if apl_active && partial.total < current.total {
            let y = average_shortest_path(&g).map_err(|_| ObjectiveError::Disconnected)?;
            obj.evaluation_from_parts(new_degree_sum, new_cc, Some(y))
        } else {
            partial
        };
        if candidate.total < current.total {
            current = candidate;
            accepted += 1;
            let point = TracePoint {
                iteration: evaluated,
                eval: candidate,
            };
            observer(&g, &point);
            trace.push(point);
        } else {
            for &(x, pre) in &touched {
                cnt[g.degree(x)] -= 1;
                cnt[pre] += 1;
            }
            g.revert(&m)?;
            if let Some(t) = tracker.as_mut() {
                t.revert_deltas(&tri_deltas);
            }
        }
    }

    let final_eval = evaluate(&g, obj)?;
    debug_assert!((final_eval.total - current.total).abs() < 1e-9);
    Ok(RunResult {
        final_graph: g,
        final_eval,
        accepted_count: accepted,
        rejected_disconnected_count: rejected_disconnected,
        evaluated_count: evaluated,
        proposal_count: proposals,
        trace,
        seed: cfg.rng_seed,
        budget_exhausted,
        move_space_exhausted,
    })
}

/// Writes the accepted-step trace as text lines
/// `iter total degree_term cc_term apl_term`.
pub fn write_trace<W: Write>(result: &RunResult, mut out: W) -> io::Result<()> {
    for point in &result.trace {
        writeln!(
            out,
            "{} {} {} {} {}",
            point.iteration,
            point.eval.total,
            point.eval.degree_term,
            point.eval.cc_term,
            point.eval.apl_term
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{build_degree_sequence, DegreeSequence, PowerLawSpec};

    // Tests at small n use kmin = 2: it keeps the mean target degree above
    // 2, so the edge budget always clears the spanning-tree bound.
    fn targets(gamma: f64, kmin: u32, n: usize) -> DegreeSequence {
        build_degree_sequence(&PowerLawSpec::new(gamma, kmin, n)).unwrap()
    }

    fn small_cfg(seed: u64, iterations: u64) -> OptimizerConfig {
        let mut cfg = OptimizerConfig::new(seed);
        cfg.iterations = iterations;
        cfg
    }

    #[test]
    fn forced_two_node_run_is_already_optimal() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 1, 2));
        let result = run(&obj, &small_cfg(0, 1000)).unwrap();
        assert_eq!(result.final_eval.total, 0.0);
        assert_eq!(result.final_graph.edges(), &[(0, 1)]);
        assert!(result.move_space_exhausted);
        assert_eq!(result.accepted_count, 0);
        assert_eq!(result.trace.len(), 1);
    }

    #[test]
    fn degree_only_run_is_monotone() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 20));
        let result = run(&obj, &small_cfg(7, 50_000)).unwrap();
        let initial = result.trace[0].eval.total;
        assert!(result.final_eval.total <= initial);
        assert!(result
            .trace
            .windows(2)
            .all(|w| w[1].eval.total < w[0].eval.total));
        assert_eq!(result.final_graph.n_edges(), obj.targets.edge_budget());
        assert!(is_connected(&result.final_graph));
        assert_eq!(result.evaluated_count, 50_000);
    }

    #[test]
    fn runs_are_deterministic() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 25)).with_cc_constraint(1.0, 0.2);
        let a = run(&obj, &small_cfg(11, 3000)).unwrap();
        let b = run(&obj, &small_cfg(11, 3000)).unwrap();
        assert_eq!(a, b);
        let c = run(&obj, &small_cfg(12, 3000)).unwrap();
        assert_ne!(a.final_graph, c.final_graph);
    }

    #[test]
    fn incremental_and_full_clustering_agree() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 30)).with_cc_constraint(1.0, 0.25);
        let mut fast = small_cfg(5, 4000);
        fast.incremental_cc = true;
        let mut slow = fast.clone();
        slow.incremental_cc = false;
        let a = run(&obj, &fast).unwrap();
        let b = run(&obj, &slow).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.final_graph, b.final_graph);
        assert_eq!(a.final_eval, b.final_eval);
    }

    #[test]
    fn final_eval_matches_fresh_evaluation() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 40))
            .with_cc_constraint(1.0, 0.3)
            .with_apl_constraint(1.0, None);
        let result = run(&obj, &small_cfg(3, 1500)).unwrap();
        let fresh = evaluate(&result.final_graph, &obj).unwrap();
        assert_eq!(result.final_eval, fresh);
        assert_eq!(
            result.final_eval.total,
            result.trace.last().unwrap().eval.total
        );
    }

    #[test]
    fn observer_sees_connected_graphs_with_constant_edge_count() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 25)).with_cc_constraint(1.0, 0.2);
        let e = obj.targets.edge_budget();
        let mut steps = 0;
        let result = run_observed(&obj, &small_cfg(19, 3000), |g, point| {
            steps += 1;
            assert!(is_connected(g));
            assert_eq!(g.n_edges(), e);
            assert!(point.iteration >= 1);
        })
        .unwrap();
        assert_eq!(steps, result.accepted_count);
    }

    #[test]
    fn proposal_cap_flags_budget_exhaustion() {
        // Pin the edge budget at spanning-tree density: every edge is a
        // bridge, so most rewires disconnect and the proposal cap binds
        // before the iteration budget completes.
        let seq = targets(2.0, 2, 12).with_edge_budget(11).unwrap();
        let obj = ObjectiveSpec::degree_only(seq);
        let mut cfg = small_cfg(2, 10_000);
        cfg.max_proposals = Some(10_000);
        let result = run(&obj, &cfg).unwrap();
        assert!(result.budget_exhausted);
        assert!(result.evaluated_count < 10_000);
        assert_eq!(result.proposal_count, 10_000);
    }

    #[test]
    fn counting_disconnected_consumes_iterations() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 20));
        let mut cfg = small_cfg(4, 2000);
        cfg.count_disconnected = true;
        let result = run(&obj, &cfg).unwrap();
        assert_eq!(result.evaluated_count, 2000);
        assert!(result.proposal_count >= result.evaluated_count);
        // Under this reading the counter includes the disconnected ones.
        assert!(result.rejected_disconnected_count > 0);
    }

    #[test]
    fn config_validation() {
        let mut cfg = OptimizerConfig::new(0);
        cfg.iterations = 0;
        assert!(cfg.validate().is_err());
        cfg.iterations = 100;
        cfg.max_proposals = Some(50);
        assert!(cfg.validate().is_err());
        cfg.max_proposals = Some(100);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn complete_graph_target_exhausts_move_space() {
        // Edge budget pinned at K4 density: the initial graph is complete,
        // so no rewire exists and the run stops immediately.
        let seq = targets(2.0, 1, 4).with_edge_budget(6).unwrap();
        let obj = ObjectiveSpec::degree_only(seq);
        let result = run(&obj, &small_cfg(0, 10)).unwrap();
        assert!(result.move_space_exhausted);
        assert_eq!(result.proposal_count, 0);
        assert_eq!(result.final_graph.n_edges(), 6);
    }

    #[test]
    fn trace_round_trips_through_text() {
        let obj = ObjectiveSpec::degree_only(targets(2.0, 2, 15)).with_cc_constraint(1.0, 0.3);
        let result = run(&obj, &small_cfg(8, 500)).unwrap();
        let mut buf = Vec::new();
        write_trace(&result, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), result.trace.len());
        for (line, point) in lines.iter().zip(&result.trace) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            assert_eq!(fields.len(), 5);
            assert_eq!(fields[0].parse::<u64>().unwrap(), point.iteration);
            assert_eq!(fields[1].parse::<f64>().unwrap(), point.eval.total);
        }
    }
}
