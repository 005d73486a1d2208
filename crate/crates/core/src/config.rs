//! Batch configuration: one `[label]` section per experiment group.
//!
//! The format is line-oriented text. A `[label]` header opens a group;
//! `key = value` lines fill it; `#` starts a comment anywhere on a line.
//! Required keys are `gamma` and `kmin`; everything else has a default.
//! Unknown and duplicated keys are rejected with their line number.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

/// Errors from configuration loading.
#[derive(Debug)]
pub enum ConfigError {
    /// Underlying I/O failure.
    Io(io::Error),
    /// Malformed content, with the 1-based line number.
    Parse { line: usize, msg: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(err) => write!(f, "config I/O error: {err}"),
            ConfigError::Parse { line, msg } => write!(f, "config line {line}: {msg}"),
        }
    }
}

impl std::error::Error for ConfigError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigError::Io(err) => Some(err),
            ConfigError::Parse { .. } => None,
        }
    }
}

impl From<io::Error> for ConfigError {
    fn from(err: io::Error) -> Self {
        ConfigError::Io(err)
    }
}

/// Parameters of one experiment group (one table row).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    /// Name used in reports and output file names.
    pub label: String,
    /// Target power-law exponent.
    pub gamma: f64,
    /// Minimum target degree.
    pub kmin: u32,
    /// Pins the maximum degree instead of resolving it from the
    /// expected-occurrence cutoff.
    pub kmax_override: Option<u32>,
    /// Pins the edge budget instead of deriving it from the sequence.
    pub edge_override: Option<usize>,
    /// Weight on the path-length penalty.
    pub theta: f64,
    /// Weight on the clustering penalty.
    pub phi: f64,
    /// Path-length target; the constraint is active iff present.
    pub apl_target: Option<f64>,
    /// Clustering target; the constraint is active iff present.
    pub cc_target: Option<f64>,
    /// Network size.
    pub n_nodes: usize,
    /// Independent runs per group.
    pub repetitions: usize,
    /// Optimizer iteration budget per run.
    pub iterations: u64,
    /// Run r uses seed `base_seed + r`.
    pub base_seed: u64,
}

impl GroupConfig {
    /// Group with the standard experiment defaults: 300 nodes, 30
    /// repetitions, 100000 iterations, unit weights, base seed 0.
    pub fn new(label: impl Into<String>, gamma: f64, kmin: u32) -> Self {
        GroupConfig {
            label: label.into(),
            gamma,
            kmin,
            kmax_override: None,
            edge_override: None,
            theta: 1.0,
            phi: 1.0,
            apl_target: None,
            cc_target: None,
            n_nodes: 300,
            repetitions: 30,
            iterations: 100_000,
            base_seed: 0,
        }
    }

    /// Checks every field range.
    pub fn validate(&self) -> Result<(), String> {
        if self.label.is_empty() {
            return Err("label must be non-empty".into());
        }
        if !self.gamma.is_finite() || self.gamma <= 1.0 {
            return Err(format!(
                "gamma must be a finite value > 1, got {}",
                self.gamma
            ));
        }
        if self.n_nodes < 2 {
            return Err(format!("n_nodes must be at least 2, got {}", self.n_nodes));
        }
        let max_degree = (self.n_nodes - 1) as u32;
        if self.kmin < 1 || self.kmin > max_degree {
            return Err(format!(
                "kmin must lie in [1, {max_degree}], got {}",
                self.kmin
            ));
        }
        if let Some(kmax) = self.kmax_override {
            if kmax < self.kmin || kmax > max_degree {
                return Err(format!(
                    "kmax_override must lie in [{}, {max_degree}], got {kmax}",
                    self.kmin
                ));
            }
        }
        if let Some(e) = self.edge_override {
            let max_edges = self.n_nodes * (self.n_nodes - 1) / 2;
            if e + 1 < self.n_nodes || e > max_edges {
                return Err(format!(
                    "edge_override must lie in [{}, {max_edges}], got {e}",
                    self.n_nodes - 1
                ));
            }
        }
        if !self.theta.is_finite() || self.theta < 0.0 {
            return Err(format!("theta must be finite and >= 0, got {}", self.theta));
        }
        if !self.phi.is_finite() || self.phi < 0.0 {
            return Err(format!("phi must be finite and >= 0, got {}", self.phi));
        }
        if let Some(cc) = self.cc_target {
            if !cc.is_finite() || !(0.0..=1.0).contains(&cc) {
                return Err(format!("cc_target must lie in [0, 1], got {cc}"));
            }
        }
        if let Some(apl) = self.apl_target {
            if !apl.is_finite() || apl <= 0.0 {
                return Err(format!("apl_target must be finite and > 0, got {apl}"));
            }
        }
        if self.repetitions < 1 {
            return Err("repetitions must be at least 1".into());
        }
        if self.iterations < 1 {
            return Err("iterations must be at least 1".into());
        }
        Ok(())
    }
}

/// Accumulates one section until both required keys have appeared.
struct PendingGroup {
    header_line: usize,
    cfg: GroupConfig,
    has_gamma: bool,
    has_kmin: bool,
    seen: HashSet<String>,
}

impl PendingGroup {
    fn new(label: &str, header_line: usize) -> Self {
        PendingGroup {
            header_line,
            cfg: GroupConfig::new(label, f64::NAN, 1),
            has_gamma: false,
            has_kmin: false,
            seen: HashSet::new(),
        }
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        if !self.seen.insert(key.to_string()) {
            return Err(ConfigError::Parse {
                line,
                msg: format!("duplicate key '{key}' in section [{}]", self.cfg.label),
            });
        }
        fn parse<T: std::str::FromStr>(
            key: &str,
            value: &str,
            line: usize,
        ) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Parse {
                line,
                msg: format!("invalid value '{value}' for key '{key}'"),
            })
        }
        match key {
            "gamma" => {
                self.cfg.gamma = parse(key, value, line)?;
                self.has_gamma = true;
            }
            "kmin" => {
                self.cfg.kmin = parse(key, value, line)?;
                self.has_kmin = true;
            }
            "kmax_override" => self.cfg.kmax_override = Some(parse(key, value, line)?),
            "edge_override" => self.cfg.edge_override = Some(parse(key, value, line)?),
            "theta" => self.cfg.theta = parse(key, value, line)?,
            "phi" => self.cfg.phi = parse(key, value, line)?,
            "apl_target" => self.cfg.apl_target = Some(parse(key, value, line)?),
            "cc_target" => self.cfg.cc_target = Some(parse(key, value, line)?),
            "n_nodes" => self.cfg.n_nodes = parse(key, value, line)?,
            "repetitions" => self.cfg.repetitions = parse(key, value, line)?,
            "iterations" => self.cfg.iterations = parse(key, value, line)?,
            "base_seed" => self.cfg.base_seed = parse(key, value, line)?,
            _ => {
                return Err(ConfigError::Parse {
                    line,
                    msg: format!("unknown key '{key}'"),
                })
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<GroupConfig, ConfigError> {
        if !self.has_gamma || !self.has_kmin {
            return Err(ConfigError::Parse {
                line: self.header_line,
                msg: format!(
                    "section [{}] is missing required key(s): {}",
                    self.cfg.label,
                    match (self.has_gamma, self.has_kmin) {
                        (false, false) => "gamma, kmin",
                        (false, true) => "gamma",
                        _ => "kmin",
                    }
                ),
            });
        }
        self.cfg.validate().map_err(|msg| ConfigError::Parse {
            line: self.header_line,
            msg,
        })?;
        Ok(self.cfg)
    }
}

/// Parses configuration text into validated groups, in file order.
pub fn parse_config(text: &str) -> Result<Vec<GroupConfig>, ConfigError> {
    let mut groups: Vec<GroupConfig> = Vec::new();
    let mut labels: HashSet<String> = HashSet::new();
    let mut current: Option<PendingGroup> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(inner) = line.strip_prefix('[') {
            let label = inner.strip_suffix(']').ok_or(ConfigError::Parse {
                line: line_no,
                msg: "section header must be '[label]'".into(),
            })?;
            let label = label.trim();
            if label.is_empty() {
                return Err(ConfigError::Parse {
                    line: line_no,
                    msg: "section label must be non-empty".into(),
                });
            }
            if !labels.insert(label.to_string()) {
                return Err(ConfigError::Parse {
                    line: line_no,
                    msg: format!("duplicate section label '{label}'"),
                });
            }
            if let Some(pending) = current.take() {
                groups.push(pending.finish()?);
            }
            current = Some(PendingGroup::new(label, line_no));
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: line_no,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        let pending = current.as_mut().ok_or(ConfigError::Parse {
            line: line_no,
            msg: "key outside any [label] section".into(),
        })?;
        pending.set(key.trim(), value.trim(), line_no)?;
    }
    if let Some(pending) = current.take() {
        groups.push(pending.finish()?);
    }
    Ok(groups)
}

/// Loads and parses a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Vec<GroupConfig>, ConfigError> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}
