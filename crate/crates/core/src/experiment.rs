//! Batch orchestration: N runs per group, statistics, and file emission.
//!
//! Every run is a pure function of its seed (`base_seed + run_index`), so
//! executing a group serially or across threads produces bit-identical
//! statistics; workers only decide *who* computes each run, never *what*.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use crate::config::GroupConfig;
use crate::fit::{fit_gamma, histogram, FitMethod};
use crate::graph::write_edge_list;
use crate::metrics::{average_shortest_path, clustering_coefficient};
use crate::objective::ObjectiveSpec;
use crate::optimizer::{run, write_trace, OptimizerConfig, OptimizerError, RunResult};
use crate::sampler::{build_degree_sequence, DegreeSequence, PowerLawSpec, SamplerError};

/// Errors from batch execution.
#[derive(Debug)]
pub enum ExperimentError {
    /// A group failed validation before any run started.
    InvalidGroup { label: String, msg: String },
    /// Degree-sequence construction failed for a group.
    Sequence { label: String, source: SamplerError },
    /// One optimization run failed; the group is aborted.
    Run {
        label: String,
        run: usize,
        source: OptimizerError,
    },
    /// Output emission failed.
    Io(io::Error),
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentError::InvalidGroup { label, msg } => {
                write!(f, "group '{label}': {msg}")
            }
            ExperimentError::Sequence { label, source } => {
                write!(f, "group '{label}': degree sequence failed: {source}")
            }
            ExperimentError::Run { label, run, source } => {
                write!(f, "group '{label}' run {run}: {source}")
            }
            ExperimentError::Io(err) => write!(f, "output error: {err}"),
        }
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ExperimentError::InvalidGroup { .. } => None,
            ExperimentError::Sequence { source, .. } => Some(source),
            ExperimentError::Run { source, .. } => Some(source),
            ExperimentError::Io(err) => Some(err),
        }
    }
}

impl From<io::Error> for ExperimentError {
    fn from(err: io::Error) -> Self {
        ExperimentError::Io(err)
    }
}

/// Where and how a batch writes its outputs.
#[derive(Debug, Clone)]
pub struct BatchOptions {
    /// Directory for edge lists, traces, and reports; `None` keeps the
    /// batch purely in memory.
    pub out_dir: Option<PathBuf>,
    /// Worker threads per group (clamped to the repetition count).
    pub parallel: usize,
    /// Also write per-run accepted-step traces.
    pub write_traces: bool,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            out_dir: None,
            parallel: 1,
            write_traces: false,
        }
    }
}

/// Measurements of one finished run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    /// Least-squares exponent of the final network, when fittable.
    pub gamma_ls: Option<f64>,
    /// Maximum-likelihood exponent of the final network, when fittable.
    pub gamma_mle: Option<f64>,
    /// Clustering coefficient of the final network.
    pub cc: f64,
    /// Mean path length of the final network.
    pub apl: f64,
    pub final_total: f64,
    pub accepted: u64,
    pub evaluated: u64,
    pub proposals: u64,
}

/// Sample mean and standard deviation (N−1 denominator) of one metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub avg: f64,
    pub std: f64,
    /// Number of values the summary is over.
    pub n: usize,
}

impl Summary {
    /// Aggregates in input order. Fewer than two values report a standard
    /// deviation of 0 by convention; zero values report a NaN average.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Summary {
                avg: f64::NAN,
                std: 0.0,
                n,
            };
        }
        let avg = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Summary { avg, std, n }
    }
}

/// Aggregated results of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub label: String,
    /// The configuration the group ran with.
    pub config: GroupConfig,
    /// One record per run, in run order.
    pub records: Vec<RunRecord>,
    pub gamma_ls: Summary,
    pub gamma_mle: Summary,
    pub apl: Summary,
    pub cc: Summary,
    /// Degree counts summed over all runs, for distribution plots.
    pub pooled_degrees: Vec<(u32, u64)>,
}

impl GroupStats {
    /// True when the group has a single repetition, whose STD columns are
    /// 0 by convention.
    pub fn single_run(&self) -> bool {
        self.records.len() == 1
    }
}

/// Degree targets for a group, honoring its kmax and edge overrides.
pub fn group_sequence(cfg: &GroupConfig) -> Result<DegreeSequence, ExperimentError> {
    let mut spec = PowerLawSpec::new(cfg.gamma, cfg.kmin, cfg.n_nodes);
    spec.kmax_override = cfg.kmax_override;
    let wrap = |source| ExperimentError::Sequence {
        label: cfg.label.clone(),
        source,
    };
    let seq = build_degree_sequence(&spec).map_err(wrap)?;
    match cfg.edge_override {
        Some(e) => seq.with_edge_budget(e).map_err(wrap),
        None => Ok(seq),
    }
}

/// Full objective for a group: degree term plus whichever trait
/// constraints the group declares targets for.
pub fn group_objective(cfg: &GroupConfig) -> Result<ObjectiveSpec, ExperimentError> {
    let mut obj = ObjectiveSpec::degree_only(group_sequence(cfg)?);
    if let Some(cc) = cfg.cc_target {
        obj = obj.with_cc_constraint(cfg.phi, cc);
    }
    if let Some(l) = cfg.apl_target {
        obj = obj.with_apl_constraint(cfg.theta, Some(l));
    }
    Ok(obj)
}

/// Executes and measures a single run of a group.
fn run_one(
    cfg: &GroupConfig,
    obj: &ObjectiveSpec,
    run_index: usize,
) -> Result<(RunRecord, RunResult), ExperimentError> {
    let seed = cfg.base_seed.wrapping_add(run_index as u64);
    let mut ocfg = OptimizerConfig::new(seed);
    ocfg.iterations = cfg.iterations;
    let result = run(obj, &ocfg).map_err(|source| ExperimentError::Run {
        label: cfg.label.clone(),
        run: run_index,
        source,
    })?;

    let g = &result.final_graph;
    let cc = clustering_coefficient(g);
    let apl = average_shortest_path(g).expect("optimizer returns connected graphs");
    let h = histogram(g);
    let gamma_ls = fit_gamma(&h, cfg.kmin, FitMethod::LeastSquares)
        .ok()
        .map(|f| f.gamma_hat);
    let gamma_mle = fit_gamma(&h, cfg.kmin, FitMethod::MaxLikelihood)
        .ok()
        .map(|f| f.gamma_hat);
    let record = RunRecord {
        run_index,
        seed,
        gamma_ls,
        gamma_mle,
        cc,
        apl,
        final_total: result.final_eval.total,
        accepted: result.accepted_count,
        evaluated: result.evaluated_count,
        proposals: result.proposal_count,
    };
    Ok((record, result))
}

/// Runs all repetitions, distributing run indices over worker threads.
/// Results land in index-ordered slots, so the outcome is identical for
/// any worker count.
fn execute_runs(
    cfg: &GroupConfig,
    obj: &ObjectiveSpec,
    parallel: usize,
) -> Result<Vec<(RunRecord, RunResult)>, ExperimentError> {
    let reps = cfg.repetitions;
    let workers = parallel.clamp(1, reps);
    if workers == 1 {
        return (0..reps).map(|r| run_one(cfg, obj, r)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(RunRecord, RunResult)>>> = Mutex::new(vec![None; reps]);
    let failure: Mutex<Option<ExperimentError>> = Mutex::new(None);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let r = next.fetch_add(1, Ordering::Relaxed);
                if r >= reps || failure.lock().unwrap().is_some() {
                    break;
                }
                match run_one(cfg, obj, r) {
                    Ok(outcome) => slots.lock().unwrap()[r] = Some(outcome),
                    Err(err) => {
                        *failure.lock().unwrap() = Some(err);
                        break;
                    }
                }
            });
        }
    });
    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    Ok(slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("every run index was claimed by a worker"))
        .collect())
}

/// Runs one group to completion: `repetitions` independent optimizations,
/// per-run measurement, aggregation, and (optionally) file emission.
pub fn run_group(cfg: &GroupConfig, opts: &BatchOptions) -> Result<GroupStats, ExperimentError> {
    cfg.validate()
        .map_err(|msg| ExperimentError::InvalidGroup {
            label: cfg.label.clone(),
            msg,
        })?;
    let obj = group_objective(cfg)?;
    let outcomes = execute_runs(cfg, &obj, opts.parallel)?;

    if let Some(dir) = &opts.out_dir {
        fs::create_dir_all(dir)?;
        for (record, result) in &outcomes {
            let graph_path = dir.join(format!("graph_{}_{}.txt", cfg.label, record.run_index));
            write_edge_list(
                &result.final_graph,
                BufWriter::new(File::create(graph_path)?),
            )?;
            if opts.write_traces {
                let trace_path = dir.join(format!("trace_{}_{}.txt", cfg.label, record.run_index));
                write_trace(result, BufWriter::new(File::create(trace_path)?))?;
            }
        }
    }

    let mut pooled: BTreeMap<u32, u64> = BTreeMap::new();
    for (_, result) in &outcomes {
        for &(k, c) in histogram(&result.final_graph).pairs() {
            *pooled.entry(k).or_insert(0) += c;
        }
    }

    let records: Vec<RunRecord> = outcomes.into_iter().map(|(record, _)| record).collect();
    let collect =
        |f: fn(&RunRecord) -> Option<f64>| -> Vec<f64> { records.iter().filter_map(f).collect() };
    let gamma_ls = Summary::from_values(&collect(|r| r.gamma_ls));
    let gamma_mle = Summary::from_values(&collect(|r| r.gamma_mle));
    let apl = Summary::from_values(&collect(|r| Some(r.apl)));
    let cc = Summary::from_values(&collect(|r| Some(r.cc)));

    Ok(GroupStats {
        label: cfg.label.clone(),
        config: cfg.clone(),
        records,
        gamma_ls,
        gamma_mle,
        apl,
        cc,
        pooled_degrees: pooled.into_iter().collect(),
    })
}

/// Runs every group in order and, when an output directory is set, writes
/// the aggregate report files.
pub fn run_batch(
    cfgs: &[GroupConfig],
    opts: &BatchOptions,
) -> Result<Vec<GroupStats>, ExperimentError> {
    let mut all = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        all.push(run_group(cfg, opts)?);
    }
    if let Some(dir) = &opts.out_dir {
        emit_report(&all, dir)?;
    }
    Ok(all)
}

fn fmt_stat(s: &Summary, pick_avg: bool) -> String {
    if s.n == 0 {
        String::new()
    } else if pick_avg {
        format!("{}", s.avg)
    } else {
        format!("{}", s.std)
    }
}

/// Writes `report.csv` (one row per group) and one `degdist_<label>.csv`
/// per group (empirical degree distribution pooled over its runs).
pub fn emit_report(stats: &[GroupStats], dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut report = BufWriter::new(File::create(dir.join("report.csv"))?);
    writeln!(
        report,
        "label,runs,n_nodes,iterations,base_seed,avg_gamma_ls,std_gamma_ls,\
         avg_gamma_mle,std_gamma_mle,avg_apl,std_apl,avg_cc,std_cc,notes"
    )?;
    for s in stats {
        let notes = if s.single_run() { "single run" } else { "" };
        writeln!(
            report,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.label,
            s.records.len(),
            s.config.n_nodes,
            s.config.iterations,
            s.config.base_seed,
            fmt_stat(&s.gamma_ls, true),
            fmt_stat(&s.gamma_ls, false),
            fmt_stat(&s.gamma_mle, true),
            fmt_stat(&s.gamma_mle, false),
            fmt_stat(&s.apl, true),
            fmt_stat(&s.apl, false),
            fmt_stat(&s.cc, true),
            fmt_stat(&s.cc, false),
            notes
        )?;
    }
    report.flush()?;

    for s in stats {
        let total: u64 = s.pooled_degrees.iter().map(|&(_, c)| c).sum();
        let mut dist = BufWriter::new(File::create(dir.join(format!("degdist_{}.csv", s.label)))?);
        writeln!(dist, "k,p")?;
        for &(k, c) in &s.pooled_degrees {
            writeln!(dist, "{},{}", k, c as f64 / total as f64)?;
        }
        dist.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    // kmin = 2 keeps the 30-node sequence feasible (mean target degree > 2).
    fn tiny_group() -> GroupConfig {
        let mut cfg = GroupConfig::new("t", 2.0, 2);
        cfg.n_nodes = 30;
        cfg.repetitions = 3;
        cfg.iterations = 400;
        cfg.cc_target = Some(0.2);
        cfg.base_seed = 5;
        cfg
    }

    #[test]
    fn group_runs_use_consecutive_seeds() {
        let stats = run_group(&tiny_group(), &BatchOptions::default()).unwrap();
        assert_eq!(stats.records.len(), 3);
        for (i, rec) in stats.records.iter().enumerate() {
            assert_eq!(rec.run_index, i);
            assert_eq!(rec.seed, 5 + i as u64);
        }
        assert_eq!(stats.cc.n, 3);
    }

    #[test]
    fn groups_rerun_bit_identically() {
        let cfg = tiny_group();
        let a = run_group(&cfg, &BatchOptions::default()).unwrap();
        let b = run_group(&cfg, &BatchOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_execution_matches_serial() {
        let cfg = tiny_group();
        let serial = run_group(&cfg, &BatchOptions::default()).unwrap();
        let opts = BatchOptions {
            parallel: 3,
            ..BatchOptions::default()
        };
        let parallel = run_group(&cfg, &opts).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn single_run_reports_zero_std() {
        let mut cfg = tiny_group();
        cfg.repetitions = 1;
        let stats = run_group(&cfg, &BatchOptions::default()).unwrap();
        assert!(stats.single_run());
        assert_eq!(stats.cc.std, 0.0);
        assert_eq!(stats.apl.std, 0.0);
    }

    #[test]
    fn summaries_match_direct_recomputation() {
        let stats = run_group(&tiny_group(), &BatchOptions::default()).unwrap();
        let ccs: Vec<f64> = stats.records.iter().map(|r| r.cc).collect();
        let avg = ccs.iter().sum::<f64>() / ccs.len() as f64;
        let var = ccs.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (ccs.len() - 1) as f64;
        assert!((stats.cc.avg - avg).abs() < 1e-15);
        assert!((stats.cc.std - var.sqrt()).abs() < 1e-15);
        // Pooled degree counts cover every node of every run.
        let pooled: u64 = stats.pooled_degrees.iter().map(|&(_, c)| c).sum();
        assert_eq!(pooled, 3 * 30);
    }

    #[test]
    fn summary_edge_cases() {
        let empty = Summary::from_values(&[]);
        assert!(empty.avg.is_nan());
        assert_eq!(empty.std, 0.0);
        let one = Summary::from_values(&[2.5]);
        assert_eq!(one.avg, 2.5);
        assert_eq!(one.std, 0.0);
    }

    #[test]
    fn invalid_group_is_rejected_with_label() {
        let mut cfg = tiny_group();
        cfg.gamma = 0.5;
        match run_group(&cfg, &BatchOptions::default()) {
            Err(ExperimentError::InvalidGroup { label, .. }) => assert_eq!(label, "t"),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn objective_reflects_group_constraints() {
        let mut cfg = tiny_group();
        cfg.apl_target = Some(3.0);
        cfg.theta = 2.0;
        cfg.phi = 0.5;
        let obj = group_objective(&cfg).unwrap();
        assert_eq!(obj.cc_target, Some(0.2));
        assert_eq!(obj.apl_target, Some(3.0));
        assert_eq!(obj.theta, 2.0);
        assert_eq!(obj.phi, 0.5);
        assert_eq!(obj.targets.n_nodes(), 30);
    }

    #[test]
    fn edge_override_pins_the_budget() {
        let mut cfg = tiny_group();
        cfg.edge_override = Some(40);
        let seq = group_sequence(&cfg).unwrap();
        assert_eq!(seq.edge_budget(), 40);
    }
}
