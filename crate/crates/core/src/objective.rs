//! Penalty objective: degree mismatch plus weighted squared residuals of
//! the active trait constraints.
//!
//! The degree term compares the graph's degrees to the targets as sorted
//! multisets — rank i of the sorted degrees against rank i of the sorted
//! targets. Rank matching makes the term invariant under node relabeling:
//! any node may end up carrying any target, which leaves single-edge
//! rewires a rich space of mismatch-neutral moves through which the trait
//! penalties can keep improving after the degree term has bottomed out.
//! Matching by fixed node index instead freezes the search as soon as the
//! degree term converges, far from the trait targets.
//!
//! The weight convention is fixed once for the whole crate: `theta`
//! weights the average-shortest-path penalty and `phi` weights the
//! clustering penalty. A constraint is active exactly when its target is
//! present.

use std::fmt;

use crate::graph::Graph;
use crate::metrics::{average_shortest_path, clustering_coefficient};
use crate::sampler::DegreeSequence;

/// Errors from objective assembly and evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveError {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// Graph and target sequence disagree on the node count.
    SizeMismatch { graph: usize, targets: usize },
    /// The path-length penalty is active but the graph is disconnected.
    Disconnected,
}

impl fmt::Display for ObjectiveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            ObjectiveError::SizeMismatch { graph, targets } => write!(
                f,
                "graph has {graph} nodes but the target sequence has {targets}"
            ),
            ObjectiveError::Disconnected => write!(
                f,
                "graph is disconnected; the path-length penalty is undefined"
            ),
        }
    }
}

impl std::error::Error for ObjectiveError {}

/// Full description of the quantity the optimizer minimizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveSpec {
    /// Degree targets; the mismatch term is always active.
    pub targets: DegreeSequence,
    /// Clustering-coefficient target; activates the clustering penalty.
    pub cc_target: Option<f64>,
    /// Path-length target; activates the path-length penalty.
    pub apl_target: Option<f64>,
    /// Weight on the path-length penalty (used only when `apl_target` is set).
    pub theta: f64,
    /// Weight on the clustering penalty (used only when `cc_target` is set).
    pub phi: f64,
}

impl ObjectiveSpec {
    /// Degree-only objective with unit weights and no trait constraints.
    pub fn degree_only(targets: DegreeSequence) -> Self {
        ObjectiveSpec {
            targets,
            cc_target: None,
            apl_target: None,
            theta: 1.0,
            phi: 1.0,
        }
    }

    /// Adds the clustering constraint `(cc - target)²` with weight `phi`.
    pub fn with_cc_constraint(mut self, phi: f64, target: f64) -> Self {
        self.phi = phi;
        self.cc_target = Some(target);
        self
    }

    /// Adds the path-length constraint `(y - target)²` with weight `theta`.
    /// A `None` target defaults to `ln(N)`.
    pub fn with_apl_constraint(mut self, theta: f64, target: Option<f64>) -> Self {
        self.theta = theta;
        self.apl_target = Some(target.unwrap_or_else(|| (self.targets.n_nodes() as f64).ln()));
        self
    }

    /// Checks every parameter range; evaluation calls this first.
    pub fn validate(&self) -> Result<(), ObjectiveError> {
        if !self.theta.is_finite() || self.theta < 0.0 {
            return Err(ObjectiveError::InvalidParameter(format!(
                "theta must be finite and >= 0, got {}",
                self.theta
            )));
        }
        if !self.phi.is_finite() || self.phi < 0.0 {
            return Err(ObjectiveError::InvalidParameter(format!(
                "phi must be finite and >= 0, got {}",
                self.phi
            )));
        }
        if let Some(cc) = self.cc_target {
            if !cc.is_finite() || !(0.0..=1.0).contains(&cc) {
                return Err(ObjectiveError::InvalidParameter(format!(
                    "cc_target must lie in [0, 1], got {cc}"
                )));
            }
        }
        if let Some(apl) = self.apl_target {
            if !apl.is_finite() || apl <= 0.0 {
                return Err(ObjectiveError::InvalidParameter(format!(
                    "apl_target must be finite and > 0, got {apl}"
                )));
            }
        }
        Ok(())
    }

    /// Weighted clustering penalty for a measured coefficient.
    pub fn cc_penalty(&self, measured_cc: f64) -> f64 {
        match self.cc_target {
            Some(target) => self.phi * (measured_cc - target).powi(2),
            None => 0.0,
        }
    }

    /// Weighted path-length penalty for a measured mean path length.
    pub fn apl_penalty(&self, measured_apl: f64) -> f64 {
        match self.apl_target {
            Some(target) => self.theta * (measured_apl - target).powi(2),
            None => 0.0,
        }
    }

    /// Assembles an [`Evaluation`] from already-measured pieces. The
    /// optimizer funnels its incremental quantities through here so that
    /// incremental and from-scratch totals are the same float expression.
    pub fn evaluation_from_parts(
        &self,
        degree_sum: i64,
        measured_cc: Option<f64>,
        measured_apl: Option<f64>,
    ) -> Evaluation {
        let degree_term = degree_sum as f64;
        let cc_term = measured_cc.map_or(0.0, |cc| self.cc_penalty(cc));
        let apl_term = measured_apl.map_or(0.0, |y| self.apl_penalty(y));
        Evaluation {
            degree_term,
            cc_term,
            apl_term,
            total: degree_term + cc_term + apl_term,
            measured_cc,
            measured_apl,
        }
    }
}

/// One evaluation of the objective, broken into its terms.
///
/// `cc_term` and `apl_term` are the weighted contributions, so
/// `total = degree_term + cc_term + apl_term` holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// Σ (D₍ᵢ₎ − S₍ᵢ₎)² over sorted ranks.
    pub degree_term: f64,
    /// φ·(cc − 𝒞)², or 0 when the clustering constraint is inactive.
    pub cc_term: f64,
    /// θ·(y − l)², or 0 when the path-length constraint is inactive.
    pub apl_term: f64,
    /// Sum of the three terms; the quantity the optimizer minimizes.
    pub total: f64,
    /// Clustering coefficient, measured only when its constraint is active.
    pub measured_cc: Option<f64>,
    /// Mean path length, measured only when its constraint is active.
    pub measured_apl: Option<f64>,
}

/// Prefix sums of the descending target values and of their squares;
/// `prefix[j]` covers targets `0..j`. These let [`mismatch_from_degree_counts`]
/// price a whole block of equal degrees in O(1).
pub(crate) fn target_prefix_sums(targets: &[u32]) -> (Vec<i64>, Vec<i64>) {
    let mut prefix = Vec::with_capacity(targets.len() + 1);
    let mut prefix_sq = Vec::with_capacity(targets.len() + 1);
    prefix.push(0);
    prefix_sq.push(0);
    for &t in targets {
        let t = i64::from(t);
        prefix.push(prefix.last().unwrap() + t);
        prefix_sq.push(prefix_sq.last().unwrap() + t * t);
    }
    (prefix, prefix_sq)
}

/// Multiset mismatch from a degree-count table: `cnt[k]` nodes of degree
/// k are matched, in descending degree order, against the descending
/// targets whose prefix sums are given. Runs in O(max degree) by pricing
/// each equal-degree block against its slice of target ranks:
/// Σ (k − tᵣ)² = c·k² − 2k·Σ tᵣ + Σ tᵣ².
pub(crate) fn mismatch_from_degree_counts(cnt: &[u32], prefix: &[i64], prefix_sq: &[i64]) -> i64 {
    let mut sum = 0i64;
    let mut rank = 0usize;
    for k in (0..cnt.len()).rev() {
        let c = cnt[k] as usize;
        if c == 0 {
            continue;
        }
        let (k, c_i) = (k as i64, c as i64);
        let t_sum = prefix[rank + c] - prefix[rank];
        let t_sq = prefix_sq[rank + c] - prefix_sq[rank];
        sum += c_i * k * k - 2 * k * t_sum + t_sq;
        rank += c;
    }
    debug_assert_eq!(rank + 1, prefix.len());
    sum
}

/// Builds the degree-count table `cnt[k] = #nodes of degree k`.
pub(crate) fn degree_counts(g: &Graph) -> Vec<u32> {
    let mut cnt = vec![0u32; g.n_nodes()];
    for i in 0..g.n_nodes() {
        cnt[g.degree(i as u32)] += 1;
    }
    cnt
}

/// Exact integer degree-mismatch sum Σ (D₍ᵢ₎ − S₍ᵢ₎)² between the sorted
/// degree multiset and the sorted target multiset.
pub fn degree_mismatch_sum(g: &Graph, targets: &DegreeSequence) -> Result<i64, ObjectiveError> {
    if g.n_nodes() != targets.n_nodes() {
        return Err(ObjectiveError::SizeMismatch {
            graph: g.n_nodes(),
            targets: targets.n_nodes(),
        });
    }
    let (prefix, prefix_sq) = target_prefix_sums(targets.targets());
    Ok(mismatch_from_degree_counts(
        &degree_counts(g),
        &prefix,
        &prefix_sq,
    ))
}

/// The multiset degree mismatch as a real number.
pub fn degree_mismatch(g: &Graph, targets: &DegreeSequence) -> Result<f64, ObjectiveError> {
    degree_mismatch_sum(g, targets).map(|s| s as f64)
}

/// Measures the active traits and assembles the full objective value.
///
/// Pure in (graph, spec): repeated calls agree bit-exactly.
pub fn evaluate(g: &Graph, spec: &ObjectiveSpec) -> Result<Evaluation, ObjectiveError> {
    spec.validate()?;
    let degree_sum = degree_mismatch_sum(g, &spec.targets)?;
    let measured_cc = spec.cc_target.map(|_| clustering_coefficient(g));
    let measured_apl = match spec.apl_target {
        Some(_) => Some(average_shortest_path(g).map_err(|_| ObjectiveError::Disconnected)?),
        None => None,
    };
    Ok(spec.evaluation_from_parts(degree_sum, measured_cc, measured_apl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_connected_graph;
    use crate::sampler::{build_degree_sequence, PowerLawSpec};

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    /// Generic target list for structural tests. kmin = 2 keeps the mean
    /// degree above 2, so the sequence is feasible at any size; kmin = 1
    /// sequences only clear the spanning-tree bound at large n.
    fn sequence_for(n: usize) -> DegreeSequence {
        build_degree_sequence(&PowerLawSpec::new(2.0, 2, n)).unwrap()
    }

    #[test]
    fn perfect_match_scores_zero() {
        // K4 degrees are all 3; cc = 1 and y = 1 exactly.
        let mut spec = PowerLawSpec::new(2.0, 3, 4);
        spec.kmax_override = Some(3);
        let targets = build_degree_sequence(&spec).unwrap();
        assert_eq!(targets.targets(), &[3, 3, 3, 3]);
        let obj = ObjectiveSpec::degree_only(targets)
            .with_cc_constraint(1.0, 1.0)
            .with_apl_constraint(1.0, Some(1.0));
        let eval = evaluate(&k4(), &obj).unwrap();
        assert_eq!(eval.total, 0.0);
        assert_eq!(eval.measured_cc, Some(1.0));
        assert_eq!(eval.measured_apl, Some(1.0));
    }

    #[test]
    fn multiset_matching_hand_cases() {
        // Path 0-1-2 has degrees (1,2,1); as a sorted multiset [2,1,1]
        // they meet the targets [2,1,1] exactly, wherever the hub sits.
        let targets = build_degree_sequence(&PowerLawSpec::new(2.0, 1, 3)).unwrap();
        assert_eq!(targets.targets(), &[2, 1, 1]);
        for path in [
            Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap(),
            Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap(),
        ] {
            assert_eq!(degree_mismatch_sum(&path, &targets).unwrap(), 0);
        }

        // Star on 4 nodes: sorted degrees [3,1,1,1] vs targets [2,1,1,1]
        // mismatch only at the top rank: (3-2)² = 1.
        let targets4 = build_degree_sequence(&PowerLawSpec::new(2.0, 1, 4)).unwrap();
        assert_eq!(targets4.targets(), &[2, 1, 1, 1]);
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(degree_mismatch_sum(&star, &targets4).unwrap(), 1);
    }

    #[test]
    fn zero_weights_leave_degree_term_only() {
        let targets = sequence_for(12);
        let g = random_connected_graph(12, 20, 4).unwrap();
        let obj = ObjectiveSpec::degree_only(targets.clone())
            .with_cc_constraint(0.0, 0.3)
            .with_apl_constraint(0.0, Some(2.0));
        let eval = evaluate(&g, &obj).unwrap();
        assert_eq!(eval.total, degree_mismatch(&g, &targets).unwrap());
    }

    #[test]
    fn composes_module_oracles() {
        let targets = sequence_for(12);
        let g = random_connected_graph(12, 20, 9).unwrap();
        let obj = ObjectiveSpec::degree_only(targets.clone()).with_cc_constraint(1.0, 0.3);
        let eval = evaluate(&g, &obj).unwrap();

        // Independent degree oracle: sort the degrees, compare by rank.
        let mut degs: Vec<f64> = (0..12).map(|i| g.degree(i) as f64).collect();
        degs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut deg_oracle = 0.0;
        for (d, &s) in degs.iter().zip(targets.targets()) {
            deg_oracle += (d - f64::from(s)).powi(2);
        }
        let cc = crate::metrics::clustering_coefficient(&g);
        assert!((eval.total - (deg_oracle + (cc - 0.3).powi(2))).abs() < 1e-12);
        assert_eq!(eval.measured_apl, None);
    }

    #[test]
    fn count_table_matches_sorted_oracle() {
        // The block-priced count-table path against a plain sort-and-zip.
        let targets = sequence_for(20);
        for seed in 0..50 {
            let g = random_connected_graph(20, 35, seed).unwrap();
            let fast = degree_mismatch_sum(&g, &targets).unwrap();
            let mut degs: Vec<i64> = (0..20).map(|i| g.degree(i) as i64).collect();
            degs.sort_unstable_by(|a, b| b.cmp(a));
            let slow: i64 = degs
                .iter()
                .zip(targets.targets())
                .map(|(d, &s)| (d - i64::from(s)) * (d - i64::from(s)))
                .sum();
            assert_eq!(fast, slow, "seed {seed}");
        }
    }

    #[test]
    fn mismatch_is_invariant_under_relabeling() {
        let targets = sequence_for(12);
        let g = random_connected_graph(12, 20, 7).unwrap();
        let relabeled: Vec<(u32, u32)> = g.edges().iter().map(|&(u, v)| (11 - u, 11 - v)).collect();
        let h = Graph::from_edges(12, &relabeled).unwrap();
        assert_eq!(
            degree_mismatch_sum(&g, &targets).unwrap(),
            degree_mismatch_sum(&h, &targets).unwrap()
        );
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let targets = sequence_for(12);
        let g = random_connected_graph(11, 20, 2).unwrap();
        assert_eq!(
            degree_mismatch(&g, &targets),
            Err(ObjectiveError::SizeMismatch {
                graph: 11,
                targets: 12
            })
        );
    }

    #[test]
    fn disconnected_graph_fails_only_with_apl_active() {
        let targets = sequence_for(4);
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let degree_only = ObjectiveSpec::degree_only(targets.clone());
        assert!(evaluate(&g, &degree_only).is_ok());
        let with_apl = ObjectiveSpec::degree_only(targets).with_apl_constraint(1.0, Some(2.0));
        assert_eq!(evaluate(&g, &with_apl), Err(ObjectiveError::Disconnected));
    }

    #[test]
    fn total_is_affine_in_weights() {
        let targets = sequence_for(12);
        let g = random_connected_graph(12, 24, 6).unwrap();
        let base = ObjectiveSpec::degree_only(targets)
            .with_cc_constraint(0.0, 0.25)
            .with_apl_constraint(0.0, Some(1.9));
        let at = |theta: f64, phi: f64| {
            let mut obj = base.clone();
            obj.theta = theta;
            obj.phi = phi;
            evaluate(&g, &obj).unwrap().total
        };
        let t0 = at(0.0, 0.0);
        // Slopes are the squared residuals, so equal steps add equal amounts.
        let theta_slope = at(1.0, 0.0) - t0;
        let phi_slope = at(0.0, 1.0) - t0;
        assert!(theta_slope >= 0.0 && phi_slope >= 0.0);
        assert!((at(2.0, 0.0) - t0 - 2.0 * theta_slope).abs() < 1e-12);
        assert!((at(0.0, 3.0) - t0 - 3.0 * phi_slope).abs() < 1e-12);
        assert!((at(2.0, 3.0) - t0 - 2.0 * theta_slope - 3.0 * phi_slope).abs() < 1e-12);
    }

    #[test]
    fn evaluation_is_bit_stable() {
        let targets = sequence_for(30);
        let g = random_connected_graph(30, 60, 12).unwrap();
        let obj = ObjectiveSpec::degree_only(targets)
            .with_cc_constraint(1.0, 0.2)
            .with_apl_constraint(1.0, None);
        let a = evaluate(&g, &obj).unwrap();
        let b = evaluate(&g, &obj).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.total, a.degree_term + a.cc_term + a.apl_term);
    }

    #[test]
    fn default_apl_target_is_log_n() {
        let targets = sequence_for(30);
        let obj = ObjectiveSpec::degree_only(targets).with_apl_constraint(1.0, None);
        assert_eq!(obj.apl_target, Some((30.0f64).ln()));
    }

    #[test]
    fn validate_rejects_bad_values() {
        let targets = sequence_for(4);
        let mut obj = ObjectiveSpec::degree_only(targets);
        obj.theta = -1.0;
        assert!(obj.validate().is_err());
        obj.theta = 1.0;
        obj.cc_target = Some(1.5);
        assert!(obj.validate().is_err());
        obj.cc_target = Some(0.5);
        obj.apl_target = Some(0.0);
        assert!(obj.validate().is_err());
    }
}
