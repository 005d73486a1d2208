//! Synthesis of connected networks whose degree sequences follow a
//! truncated power law while matching clustering-coefficient and
//! mean-path-length targets.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`sampler`] turns (γ, kmin, N) into deterministic integer degree
//!    targets and an edge budget.
//! 2. [`graph`] and [`metrics`] provide the simple-graph representation,
//!    rewire moves, and exact trait metrics (connectivity, clustering,
//!    mean shortest path) with incremental triangle tracking.
//! 3. [`objective`] assembles the penalty objective: degree mismatch plus
//!    weighted squared residuals of the active trait constraints.
//! 4. [`optimizer`] is the strict hill climber over single-edge rewires;
//!    disconnecting proposals are discarded outright.
//! 5. [`fit`] estimates the realized power-law exponent (least squares
//!    and maximum likelihood, reported side by side).
//! 6. [`config`] and [`experiment`] orchestrate multi-run batches with
//!    per-seed reproducibility, aggregation, and report emission.
//!
//! The `netforge` binary exposes the same stages as subcommands:
//! `sample`, `generate`, `batch`, and `measure`.

pub mod config;
pub mod experiment;
pub mod fit;
pub mod graph;
pub mod metrics;
pub mod objective;
pub mod optimizer;
pub mod sampler;

pub use config::GroupConfig;
pub use experiment::{BatchOptions, GroupStats, RunRecord, Summary};
pub use fit::{DegreeHistogram, FitMethod, FitResult};
pub use graph::{Graph, RewireMove};
pub use objective::{Evaluation, ObjectiveSpec};
pub use optimizer::{OptimizerConfig, RunResult, TracePoint};
pub use sampler::{DegreeSequence, PowerLawSpec};
