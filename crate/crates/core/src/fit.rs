//! Estimating the power-law exponent of a realized degree distribution.
//!
//! Two estimators are provided and reported side by side: log-log least
//! squares on the degree histogram (the default) and discrete maximum
//! likelihood on the truncated support. Neither is privileged; batch
//! reports carry both so result tables stay comparable either way.

use std::collections::BTreeMap;
use std::fmt;

use crate::graph::Graph;

/// Errors from histogram construction and exponent fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// A parameter violates its documented range.
    InvalidParameter(String),
    /// Too few usable histogram points above the cutoff.
    InsufficientPoints { needed: usize, got: usize },
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            FitError::InsufficientPoints { needed, got } => write!(
                f,
                "fit needs at least {needed} distinct degrees at or above the cutoff, got {got}"
            ),
        }
    }
}

impl std::error::Error for FitError {}

/// Exact degree frequency table: `(k, count)` for every degree present,
/// ascending in `k`, with counts summing to the node count.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeHistogram {
    pairs: Vec<(u32, u64)>,
    n_nodes: usize,
}

impl DegreeHistogram {
    /// Builds a histogram from explicit `(degree, count)` pairs.
    pub fn from_pairs(pairs: Vec<(u32, u64)>) -> Result<Self, FitError> {
        for window in pairs.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(FitError::InvalidParameter(format!(
                    "degrees must be distinct and ascending, got {} then {}",
                    window[0].0, window[1].0
                )));
            }
        }
        if let Some(&(k, _)) = pairs.iter().find(|&&(_, c)| c == 0) {
            return Err(FitError::InvalidParameter(format!(
                "degree {k} has a zero count; omit absent degrees"
            )));
        }
        let n_nodes = pairs.iter().map(|&(_, c)| c as usize).sum();
        Ok(DegreeHistogram { pairs, n_nodes })
    }

    /// `(degree, count)` rows, ascending in degree.
    pub fn pairs(&self) -> &[(u32, u64)] {
        &self.pairs
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }
}

/// Exact degree frequency table of a graph.
pub fn histogram(g: &Graph) -> DegreeHistogram {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for node in 0..g.n_nodes() as u32 {
        *counts.entry(g.degree(node) as u32).or_insert(0) += 1;
    }
    DegreeHistogram {
        pairs: counts.into_iter().collect(),
        n_nodes: g.n_nodes(),
    }
}

/// Which estimator produced a [`FitResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Slope of log(count/N) on log(k); the fitted exponent is minus the
    /// slope. Degrees with zero count are simply absent from the histogram.
    LeastSquares,
    /// Discrete maximum likelihood on the support truncated to
    /// [cutoff, largest observed degree], solved by golden-section search.
    MaxLikelihood,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitMethod::LeastSquares => write!(f, "least squares"),
            FitMethod::MaxLikelihood => write!(f, "maximum likelihood"),
        }
    }
}

/// A fitted exponent plus the context it was fitted in.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub gamma_hat: f64,
    pub method: FitMethod,
    /// Smallest degree actually included in the fit.
    pub kmin_used: u32,
    /// Number of distinct degrees included.
    pub points_used: usize,
}

/// Search domain and tolerance of the likelihood maximization.
const GAMMA_LO: f64 = 1.000_001;
const GAMMA_HI: f64 = 10.0;
const GAMMA_TOL: f64 = 1e-6;

/// Fits the exponent over degrees `k >= kmin`.
///
/// Both estimators need at least two distinct degrees above the cutoff:
/// with one, the regression is degenerate and the truncated likelihood is
/// constant in the exponent.
pub fn fit_gamma(h: &DegreeHistogram, kmin: u32, method: FitMethod) -> Result<FitResult, FitError> {
    if kmin < 1 {
        return Err(FitError::InvalidParameter("kmin must be at least 1".into()));
    }
    let pts: Vec<(u32, u64)> = h
        .pairs()
        .iter()
        .copied()
        .filter(|&(k, _)| k >= kmin)
        .collect();
    if pts.len() < 2 {
        return Err(FitError::InsufficientPoints {
            needed: 2,
            got: pts.len(),
        });
    }
    let kmin_used = pts[0].0;
    let points_used = pts.len();
    let gamma_hat = match method {
        FitMethod::LeastSquares => least_squares_gamma(&pts, h.n_nodes()),
        FitMethod::MaxLikelihood => likelihood_gamma(&pts, kmin),
    };
    Ok(FitResult {
        gamma_hat,
        method,
        kmin_used,
        points_used,
    })
}

/// Minus the slope of the regression of ln(count/N) on ln(k).
fn least_squares_gamma(pts: &[(u32, u64)], n_nodes: usize) -> f64 {
    let m = pts.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(k, c) in pts {
        let x = f64::from(k).ln();
        let y = (c as f64 / n_nodes as f64).ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    -slope
}

/// Maximizer of the truncated discrete power-law likelihood
/// Σ count(k)·[−γ·ln k − ln Z(γ)], Z(γ) = Σ_{j=kmin}^{kmax_obs} j^(−γ).
fn likelihood_gamma(pts: &[(u32, u64)], kmin: u32) -> f64 {
    let kmax = pts.last().expect("at least two points").0;
    let total: f64 = pts.iter().map(|&(_, c)| c as f64).sum();
    let log_k_sum: f64 = pts.iter().map(|&(k, c)| c as f64 * f64::from(k).ln()).sum();
    let log_likelihood = |gamma: f64| {
        let z: f64 = (kmin..=kmax).map(|j| f64::from(j).powf(-gamma)).sum();
        -gamma * log_k_sum - total * z.ln()
    };
    golden_max(GAMMA_LO, GAMMA_HI, GAMMA_TOL, log_likelihood)
}

/// Golden-section search for the maximum of a concave function on [a, b].
fn golden_max(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
