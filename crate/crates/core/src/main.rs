//! Command-line front end: sample degree sequences, synthesize single
//! networks, run batch experiments, and measure edge-list files.

use std::error::Error;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netforge::config::load_config;
use netforge::experiment::{run_batch, BatchOptions};
use netforge::fit::{fit_gamma, histogram, FitMethod};
use netforge::graph::{read_edge_list, write_edge_list};
use netforge::metrics::{average_shortest_path, clustering_coefficient, is_connected};
use netforge::objective::ObjectiveSpec;
use netforge::optimizer::{run, OptimizerConfig};
use netforge::sampler::{build_degree_sequence, PowerLawSpec};

#[derive(Parser)]
#[command(
    name = "netforge",
    version,
    about = "Synthesizes connected networks with power-law degree targets and trait constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the target degree sequence derived from a truncated power law.
    Sample {
        /// Power-law exponent (> 1).
        #[arg(long)]
        gamma: f64,
        /// Minimum degree.
        #[arg(long)]
        kmin: u32,
        /// Number of nodes.
        #[arg(long)]
        nodes: usize,
        /// Pin the maximum degree instead of resolving it.
        #[arg(long)]
        kmax: Option<u32>,
        /// Expected-occurrence cutoff for the maximum-degree search.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Synthesize one network and write its edge list.
    Generate {
        /// Power-law exponent (> 1).
        #[arg(long)]
        gamma: f64,
        /// Minimum degree.
        #[arg(long)]
        kmin: u32,
        /// Pin the maximum degree instead of resolving it.
        #[arg(long)]
        kmax: Option<u32>,
        /// Clustering-coefficient target; activates that constraint.
        #[arg(long)]
        cc: Option<f64>,
        /// Mean-path-length target; activates that constraint.
        #[arg(long)]
        apl: Option<f64>,
        /// Weight on the path-length penalty (default 1).
        #[arg(long, requires = "apl")]
        theta: Option<f64>,
        /// Weight on the clustering penalty (default 1).
        #[arg(long, requires = "cc")]
        phi: Option<f64>,
        /// Number of nodes.
        #[arg(long)]
        nodes: usize,
        /// Optimizer iteration budget.
        #[arg(long)]
        iters: u64,
        /// Seed for the run.
        #[arg(long)]
        seed: u64,
        /// Output edge-list file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every group in a config file and write reports.
    Batch {
        /// Group configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for edge lists and reports.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads per group.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Also write per-run accepted-step traces.
        #[arg(long)]
        traces: bool,
    },
    /// Measure an edge-list file: traits, histogram, fitted exponents.
    Measure {
        /// Edge-list file to read.
        file: PathBuf,
    },
}

fn main() -> ExitCode {
    match run_cli(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // A closed pipe (e.g. piping into `head`) is a normal way for
            // a consumer to stop reading, not a failure of ours.
            if err
                .downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe)
            {
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run_cli(cli: Cli) -> Result<(), Box<dyn Error>> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Sample {
            gamma,
            kmin,
            nodes,
            kmax,
            threshold,
        } => {
            let mut spec = PowerLawSpec::new(gamma, kmin, nodes);
            spec.kmax_override = kmax;
            if let Some(t) = threshold {
                spec.occurrence_threshold = t;
            }
            let seq = build_degree_sequence(&spec)?;
            let mut count = 0usize;
            let mut last = None;
            // Targets are descending; fold them into ascending (k, count) rows.
            let mut rows: Vec<(u32, usize)> = Vec::new();
            for &k in seq.targets().iter().rev() {
                match last {
                    Some(prev) if prev == k => count += 1,
                    Some(prev) => {
                        rows.push((prev, count));
                        count = 1;
                    }
                    None => count = 1,
                }
                last = Some(k);
            }
            if let Some(prev) = last {
                rows.push((prev, count));
            }
            for (k, c) in rows {
                writeln!(out, "{k} {c}")?;
            }
            writeln!(out, "kmax={}", seq.kmax())?;
            writeln!(out, "E={}", seq.edge_budget())?;
        }
        Command::Generate {
            gamma,
            kmin,
            kmax,
            cc,
            apl,
            theta,
            phi,
            nodes,
            iters,
            seed,
            out: out_path,
        } => {
            let mut spec = PowerLawSpec::new(gamma, kmin, nodes);
            spec.kmax_override = kmax;
            let seq = build_degree_sequence(&spec)?;
            let mut obj = ObjectiveSpec::degree_only(seq);
            if let Some(target) = cc {
                obj = obj.with_cc_constraint(phi.unwrap_or(1.0), target);
            }
            if let Some(target) = apl {
                obj = obj.with_apl_constraint(theta.unwrap_or(1.0), Some(target));
            }
            let mut cfg = OptimizerConfig::new(seed);
            cfg.iterations = iters;
            let result = run(&obj, &cfg)?;
            write_edge_list(
                &result.final_graph,
                BufWriter::new(File::create(&out_path)?),
            )?;
            let eval = &result.final_eval;
            writeln!(
                out,
                "nodes={} edges={}",
                result.final_graph.n_nodes(),
                result.final_graph.n_edges()
            )?;
            writeln!(
                out,
                "total={} degree_term={} cc_term={} apl_term={}",
                eval.total, eval.degree_term, eval.cc_term, eval.apl_term
            )?;
            if let Some(v) = eval.measured_cc {
                writeln!(out, "cc={v}")?;
            }
            if let Some(v) = eval.measured_apl {
                writeln!(out, "apl={v}")?;
            }
            writeln!(
                out,
                "accepted={} evaluated={} proposals={} rejected_disconnected={}",
                result.accepted_count,
                result.evaluated_count,
                result.proposal_count,
                result.rejected_disconnected_count
            )?;
            writeln!(out, "wrote {}", out_path.display())?;
        }
        Command::Batch {
            config,
            out: out_dir,
            parallel,
            traces,
        } => {
            let groups = load_config(&config)?;
            let opts = BatchOptions {
                out_dir: Some(out_dir.clone()),
                parallel,
                write_traces: traces,
            };
            let stats = run_batch(&groups, &opts)?;
            for s in &stats {
                writeln!(
                    out,
                    "group {}: runs={} avg_cc={} avg_apl={} avg_gamma_ls={}",
                    s.label, s.cc.n, s.cc.avg, s.apl.avg, s.gamma_ls.avg
                )?;
            }
            writeln!(out, "wrote {}", out_dir.join("report.csv").display())?;
        }
        Command::Measure { file } => {
            let g = read_edge_list(BufReader::new(File::open(&file)?))?;
            writeln!(out, "nodes={} edges={}", g.n_nodes(), g.n_edges())?;
            writeln!(out, "connected={}", is_connected(&g))?;
            writeln!(out, "cc={}", clustering_coefficient(&g))?;
            match average_shortest_path(&g) {
                Ok(y) => writeln!(out, "apl={y}")?,
                Err(err) => writeln!(out, "apl=undefined ({err})")?,
            }
            let h = histogram(&g);
            writeln!(out, "degree histogram (k count):")?;
            for &(k, c) in h.pairs() {
                writeln!(out, "{k} {c}")?;
            }
            let kmin = h.pairs().first().map_or(1, |&(k, _)| k.max(1));
            for method in [FitMethod::LeastSquares, FitMethod::MaxLikelihood] {
                let tag = match method {
                    FitMethod::LeastSquares => "gamma_ls",
                    FitMethod::MaxLikelihood => "gamma_mle",
                };
                match fit_gamma(&h, kmin, method) {
                    Ok(fit) => writeln!(
                        out,
                        "{tag}={} (kmin_used={}, points={})",
                        fit.gamma_hat, fit.kmin_used, fit.points_used
                    )?,
                    Err(err) => writeln!(out, "{tag}=unavailable ({err})")?,
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}
