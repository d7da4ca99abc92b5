//! Brute-force numeric checks of mutual-information inequalities on small
//! discrete channels, plus more-capable broadcast orders and capacities.
//!
//! Every gap is reported as `rhs - lhs`, i.e. the information toward `Y2`
//! minus the information toward `Y1`. A negative gap at any law disproves
//! the inequality; a nonnegative minimum is evidence only.

mod broadcast;
mod gaps;
mod report;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelError, StochasticMatrix};

pub use broadcast::{
    bc_more_capable_order, bc_sum_capacity, degradation_feasibility, Degradation, Capacity,
    MoreCapableOrder, BA_MAX_ITERATIONS, BA_TOL, DEGRADATION_TOL,
};
pub use gaps::{
    corollary1_gap, corollary1_gap_at, grid_min_gap, lemma1_gap_at, lemma4_gap_at,
    make_degraded_channel, memoryless_extension_n2, pair_tuple, product_gap_at, sample_lemma1_gap,
    sample_lemma3_gap_n2, sample_lemma4_gap,
};
pub use report::{channel_digest, VerificationReport};

/// Gaps at or above `-GAP_TOL` count as round-off rather than violations.
pub const GAP_TOL: f64 = 1e-10;
/// Gaps below `-DUMP_TOL` are severe enough to warrant dumping the law.
pub const DUMP_TOL: f64 = 1e-6;
/// Default cap on the number of grid points.
pub const DEFAULT_MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifierError {
    #[error("grid resolution must be at least 2, got {0}")]
    BadResolution(usize),
    #[error("projected grid size {projected:.0} exceeds max_points {cap}")]
    GridOverflow { projected: f64, cap: usize },
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("dirichlet concentration must be positive and finite, got {0}")]
    BadConcentration(f64),
    #[error("{name} must be at least 1")]
    EmptyAlphabet { name: &'static str },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("input {0} is not in the joint block")]
    NotInJointBlock(usize),
    #[error("receiver {receiver} out of range for {receivers} receivers")]
    ReceiverOutOfRange { receiver: usize, receivers: usize },
    #[error("capacity iteration did not converge in {iterations} iterations (last estimate {estimate})")]
    NonConvergence {
        iterations: usize,
        estimate: f64,
        law: Vec<f64>,
    },
    #[error("capacity estimate decreased from {previous} to {current}")]
    NonMonotone { previous: f64, current: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Discretization of a probability simplex family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    /// Denominator `m`: every coordinate ranges over `{0, 1/m, ..., 1}`.
    pub resolution: usize,
    pub max_points: usize,
    /// Sampling used in place of the grid when it would exceed `max_points`.
    /// Without one an oversized grid is an error.
    pub fallback: Option<SampleSpec>,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self, VerifierError> {
        if resolution < 2 {
            return Err(VerifierError::BadResolution(resolution));
        }
        Ok(Self {
            resolution,
            max_points: DEFAULT_MAX_POINTS,
            fallback: None,
        })
    }

    pub fn with_max_points(mut self, max_points: usize) -> Self {
        self.max_points = max_points;
        self
    }

    pub fn with_fallback(mut self, spec: SampleSpec) -> Self {
        self.fallback = Some(spec);
        self
    }
}

/// Seeded Dirichlet sampling of joint laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSpec {
    pub n_samples: usize,
    pub seed: u64,
    pub dirichlet_concentration: f64,
}

impl SampleSpec {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self, VerifierError> {
        Self::with_concentration(n_samples, seed, 1.0)
    }

    pub fn with_concentration(n_samples: usize, seed: u64, concentration: f64) -> Result<Self, VerifierError> {
        if n_samples == 0 {
            return Err(VerifierError::NoSamples);
        }
        if !(concentration.is_finite() && concentration > 0.0) {
            return Err(VerifierError::BadConcentration(concentration));
        }
        Ok(Self {
            n_samples,
            seed,
            dirichlet_concentration: concentration,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Grid,
    Sampled,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Grid => "grid",
            Mode::Sampled => "sampled",
        }
    }
}

/// One factor of a law: a joint PMF over the named variables, flattened
/// row-major in the listed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factor {
    pub variables: Vec<String>,
    pub sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

/// A law given as a product of independent factors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Law {
    pub factors: Vec<Factor>,
}

/// Outcome of a gap search over a family of laws.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapResult {
    pub mode: Mode,
    pub n_evaluated: usize,
    pub min_gap: f64,
    /// Position of the minimizer in evaluation order.
    pub argmin_index: usize,
    pub argmin_law: Law,
    /// Gap at every evaluated law, in evaluation order (sampled mode only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<f64>>,
}

impl GapResult {
    /// `min_gap >= -GAP_TOL`.
    pub fn holds(&self) -> bool {
        self.min_gap >= -GAP_TOL
    }
}

/// Draw one point of the `n`-simplex from a symmetric Dirichlet law.
pub fn dirichlet(n: usize, concentration: f64, rng: &mut impl Rng) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("concentration validated by SampleSpec");
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 && total.is_finite() {
            v.iter_mut().for_each(|x| *x /= total);
            return v;
        }
    }
}

/// Random row-stochastic matrix with Dirichlet rows.
pub fn random_stochastic(rows: usize, cols: usize, concentration: f64, rng: &mut impl Rng) -> StochasticMatrix {
    let data = (0..rows).map(|_| dirichlet(cols, concentration, rng)).collect();
    StochasticMatrix::with_tolerance(data, 1e-9).expect("dirichlet rows are stochastic")
}
