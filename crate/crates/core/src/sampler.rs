//! Target degree sequences from a truncated discrete power law.
//!
//! Everything here is deterministic: degree targets are rounded expected
//! occurrences, not random draws, so identical parameters always produce
//! identical sequences.

use std::fmt;

/// Default expected-occurrence cutoff for the maximum-degree search.
pub const DEFAULT_OCCURRENCE_THRESHOLD: f64 = 0.3;

/// Errors from degree-target generation.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerError {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// The rounded sequence is too sparse to admit a connected graph.
    InfeasibleSequence {
        /// Edge budget derived from the sequence.
        edge_budget: usize,
        /// Minimum edges needed for connectivity (`n_nodes - 1`).
        required: usize,
    },
}

impl fmt::Display for SamplerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            SamplerError::InfeasibleSequence {
                edge_budget,
                required,
            } => write!(
                f,
                "degree sequence yields {edge_budget} edges but a connected graph needs at least {required}"
            ),
        }
    }
}

impl std::error::Error for SamplerError {}

/// Parameters of the target degree distribution `p(k) ∝ k^(-gamma)` on
/// `[kmin, kmax]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawSpec {
    /// Decay exponent; must exceed 1.
    pub gamma: f64,
    /// Minimum degree value (at least 1).
    pub kmin: u32,
    /// Number of nodes in the target network (at least 2).
    pub n_nodes: usize,
    /// Expected-occurrence cutoff used by [`resolve_kmax`].
    pub occurrence_threshold: f64,
    /// Pins the maximum degree instead of resolving it from the cutoff.
    pub kmax_override: Option<u32>,
}

impl PowerLawSpec {
    /// Spec with the default cutoff and no pinned maximum degree.
    pub fn new(gamma: f64, kmin: u32, n_nodes: usize) -> Self {
        PowerLawSpec {
            gamma,
            kmin,
            n_nodes,
            occurrence_threshold: DEFAULT_OCCURRENCE_THRESHOLD,
            kmax_override: None,
        }
    }

    /// Checks every parameter range; all operations call this first.
    pub fn validate(&self) -> Result<(), SamplerError> {
        if !self.gamma.is_finite() || self.gamma <= 1.0 {
            return Err(SamplerError::InvalidParameter(format!(
                "gamma must be a finite value > 1, got {}",
                self.gamma
            )));
        }
        if self.n_nodes < 2 {
            return Err(SamplerError::InvalidParameter(format!(
                "n_nodes must be at least 2, got {}",
                self.n_nodes
            )));
        }
        let max_degree = (self.n_nodes - 1) as u32;
        if self.kmin < 1 || self.kmin > max_degree {
            return Err(SamplerError::InvalidParameter(format!(
                "kmin must lie in [1, {max_degree}], got {}",
                self.kmin
            )));
        }
        if !self.occurrence_threshold.is_finite() || self.occurrence_threshold <= 0.0 {
            return Err(SamplerError::InvalidParameter(format!(
                "occurrence_threshold must be > 0, got {}",
                self.occurrence_threshold
            )));
        }
        if let Some(kmax) = self.kmax_override {
            if kmax < self.kmin || kmax > max_degree {
                return Err(SamplerError::InvalidParameter(format!(
                    "kmax_override must lie in [{}, {max_degree}], got {kmax}",
                    self.kmin
                )));
            }
        }
        Ok(())
    }
}

/// The `n_nodes` integer degree targets plus derived quantities.
///
/// Targets are sorted descending. Initial graph construction hands node 0
/// the largest target and so on down the list; the objective itself scores
/// the degree multiset against the target multiset, so node identity never
/// matters after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    targets: Vec<u32>,
    kmax: u32,
    edge_budget: usize,
}

impl DegreeSequence {
    /// Degree targets, sorted descending.
    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// Realized maximum target.
    pub fn kmax(&self) -> u32 {
        self.kmax
    }

    /// Edge budget `round(Σ targets / 2)`, possibly overridden.
    pub fn edge_budget(&self) -> usize {
        self.edge_budget
    }

    pub fn n_nodes(&self) -> usize {
        self.targets.len()
    }

    /// Replaces the derived edge budget with a pinned value.
    pub fn with_edge_budget(mut self, edge_budget: usize) -> Result<Self, SamplerError> {
        let required = self.n_nodes() - 1;
        if edge_budget < required {
            return Err(SamplerError::InfeasibleSequence {
                edge_budget,
                required,
            });
        }
        let max_edges = self.n_nodes() * (self.n_nodes() - 1) / 2;
        if edge_budget > max_edges {
            return Err(SamplerError::InvalidParameter(format!(
                "edge budget {edge_budget} exceeds the {max_edges} possible edges"
            )));
        }
        self.edge_budget = edge_budget;
        Ok(self)
    }
}

/// Normalized `p(k) = k^(-gamma) / Σ_{j=kmin}^{kmax} j^(-gamma)` over
/// `[kmin, kmax]`, returned as ascending `(k, p)` pairs.
pub fn truncated_pmf(spec: &PowerLawSpec, kmax: u32) -> Result<Vec<(u32, f64)>, SamplerError> {
    spec.validate()?;
    let max_degree = (spec.n_nodes - 1) as u32;
    if kmax < spec.kmin || kmax > max_degree {
        return Err(SamplerError::InvalidParameter(format!(
            "kmax must lie in [{}, {max_degree}], got {kmax}",
            spec.kmin
        )));
    }
    let weights: Vec<(u32, f64)> = (spec.kmin..=kmax)
        .map(|k| (k, f64::from(k).powf(-spec.gamma)))
        .collect();
    let norm: f64 = weights.iter().map(|&(_, w)| w).sum();
    Ok(weights.into_iter().map(|(k, w)| (k, w / norm)).collect())
}

/// Resolves the maximum degree by the expected-occurrence cutoff.
///
/// Starting from `n_nodes - 1`, repeatedly truncate to the largest degree
/// whose expected occurrence `n_nodes * p(k)` stays at or above the
/// threshold, renormalizing each round, until the value is stable. Never
/// truncates below `kmin`. A pinned `kmax_override` is returned unchanged.
pub fn resolve_kmax(spec: &PowerLawSpec) -> Result<u32, SamplerError> {
    spec.validate()?;
    if let Some(kmax) = spec.kmax_override {
        return Ok(kmax);
    }
    let n = spec.n_nodes as f64;
    let mut kmax = (spec.n_nodes - 1) as u32;
    loop {
        let pmf = truncated_pmf(spec, kmax)?;
        let next = pmf
            .iter()
            .rev()
            .find(|&&(_, p)| n * p >= spec.occurrence_threshold)
            .map_or(spec.kmin, |&(k, _)| k);
        if next == kmax {
            return Ok(kmax);
        }
        kmax = next;
    }
}

/// Builds the degree targets: `round(n_nodes * p(k))` copies of each `k`,
/// padded with `kmin` or trimmed at the most populous degree until exactly
/// `n_nodes` entries remain, sorted descending.
pub fn build_degree_sequence(spec: &PowerLawSpec) -> Result<DegreeSequence, SamplerError> {
    let kmax = resolve_kmax(spec)?;
    let pmf = truncated_pmf(spec, kmax)?;
    let n = spec.n_nodes;

    // counts[i] is the multiplicity of degree kmin + i.
    let mut counts: Vec<usize> = pmf
        .iter()
        .map(|&(_, p)| (n as f64 * p).round() as usize)
        .collect();
    let mut total: usize = counts.iter().sum();

    if total < n {
        counts[0] += n - total;
    }
    while total > n {
        // Trim the most populous degree; ties break toward the smallest
        // degree so the tail keeps its shape.
        let (idx, _) = counts
            .iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))
            .expect("counts is non-empty");
        counts[idx] -= 1;
        total -= 1;
    }

    let mut targets = Vec::with_capacity(n);
    for (i, &count) in counts.iter().enumerate().rev() {
        let k = spec.kmin + i as u32;
        targets.extend(std::iter::repeat_n(k, count));
    }
    debug_assert_eq!(targets.len(), n);

    let degree_sum: u64 = targets.iter().map(|&k| u64::from(k)).sum();
    let edge_budget = (degree_sum as f64 / 2.0).round() as usize;
    let required = n - 1;
    if edge_budget < required {
        return Err(SamplerError::InfeasibleSequence {
            edge_budget,
            required,
        });
    }

    let kmax_realized = targets.first().copied().unwrap_or(spec.kmin);
    Ok(DegreeSequence {
        targets,
        kmax: kmax_realized,
        edge_budget,
    })
}
