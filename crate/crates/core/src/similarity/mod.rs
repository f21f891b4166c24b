//! Tag-tag and resource-resource similarity.
//!
//! Two metrics share one representation: plain cosine over tag-resource
//! count vectors, and an iterative mutual-reinforcement metric where two
//! tags grow similar by labelling similar resources and two resources grow
//! similar by carrying similar tags. A propagation factor `psi` in [0, 1]
//! gates how much similarity between *different* resources (or tags) feeds
//! each update; `psi = 0` recovers cosine exactly.

mod engine;
mod export;
mod oracle;
mod topk;

use serde::Serialize;
use thiserror::Error;

pub use engine::{cosine_tag_similarity, iterate_similarity, iterate_similarity_budgeted};
pub use export::{read_snapshot, write_matrix_csv, write_snapshot};
pub use oracle::direct_sum_step;
pub use topk::top_k_similar;

/// Default maximum absolute element change accepted as converged.
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
/// Default iteration cap guarding pathological inputs.
pub const DEFAULT_MAX_ITERATIONS: usize = 50;
/// Default budget for the dense iterate buffers (2 GiB).
pub const DEFAULT_MEMORY_BUDGET_BYTES: u64 = 2 * 1024 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("invalid iteration parameters: {0}")]
    InvalidParams(String),
    #[error("similarity requires a non-empty tag-resource matrix")]
    EmptyMatrix,
    /// Dense iterates would not fit the configured budget. Subsample the
    /// dataset or raise the budget.
    #[error(
        "dense similarity iterates need {required_bytes} bytes, over the {budget_bytes} byte budget; \
         subsample the dataset or raise the memory budget"
    )]
    MemoryBudget {
        required_bytes: u64,
        budget_bytes: u64,
    },
    /// The iteration produced a non-finite value.
    #[error("non-finite value in the {side} similarity matrix at iteration {iteration}")]
    NonFinite {
        side: &'static str,
        iteration: usize,
    },
    #[error("query tag set is empty")]
    EmptyQuery,
    #[error("tag id {id} out of range for a {dim}-tag similarity matrix")]
    TagOutOfRange { id: u32, dim: usize },
    #[error("expected {expected} labels for a {expected}-dimensional matrix, got {found}")]
    LabelCountMismatch { expected: usize, found: usize },
    #[error("corrupt similarity snapshot: {0}")]
    CorruptSnapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Propagation factor plus convergence controls for the iterative metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationParams {
    psi: f64,
    tolerance: f64,
    max_iterations: usize,
}

impl IterationParams {
    /// Validates `0 <= psi <= 1`, `tolerance > 0`, `max_iterations >= 1`.
    pub fn new(psi: f64, tolerance: f64, max_iterations: usize) -> Result<Self, SimilarityError> {
        if !(0.0..=1.0).contains(&psi) {
            return Err(SimilarityError::InvalidParams(format!(
                "psi must lie in [0, 1], got {psi}"
            )));
        }
        if !tolerance.is_finite() || tolerance <= 0.0 {
            return Err(SimilarityError::InvalidParams(format!(
                "tolerance must be positive, got {tolerance}"
            )));
        }
        if max_iterations == 0 {
            return Err(SimilarityError::InvalidParams(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(IterationParams {
            psi,
            tolerance,
            max_iterations,
        })
    }

    /// `psi` with the default tolerance and iteration cap.
    pub fn with_psi(psi: f64) -> Result<Self, SimilarityError> {
        Self::new(psi, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }
}

/// Dense symmetric similarity matrix with unit diagonal for every live id.
///
/// Ids whose tag-resource row (or resource column) is entirely zero carry no
/// evidence; their similarity to everything, their own diagonal included, is
/// defined as 0 and they are flagged dead in `live`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    dim: usize,
    values: Vec<f64>,
    live: Vec<bool>,
}

impl SimilarityMatrix {
    /// Wraps row-major values and a liveness mask.
    ///
    /// Panics when `values` is not `dim * dim` long or `live` is not `dim`
    /// long. Symmetry and range are the caller's responsibility.
    pub fn from_parts(dim: usize, values: Vec<f64>, live: Vec<bool>) -> Self {
        assert_eq!(values.len(), dim * dim, "values must be dim*dim");
        assert_eq!(live.len(), dim, "live mask must be dim");
        SimilarityMatrix { dim, values, live }
    }

    /// The identity seed: every id similar only to itself.
    pub fn identity(dim: usize) -> Self {
        let mut values = vec![0.0; dim * dim];
        for i in 0..dim {
            values[i * dim + i] = 1.0;
        }
        SimilarityMatrix {
            dim,
            values,
            live: vec![true; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        assert!(a < self.dim && b < self.dim, "index out of bounds");
        self.values[a * self.dim + b]
    }

    /// Row-major backing storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, a: usize) -> &[f64] {
        &self.values[a * self.dim..(a + 1) * self.dim]
    }

    /// Whether the id had at least one assignment.
    pub fn is_live(&self, id: usize) -> bool {
        self.live[id]
    }

    /// Ids with no assignments, flagged per the zero-evidence rule.
    pub fn dead_ids(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| !self.live[i]).collect()
    }

    /// Largest absolute elementwise difference to `other`.
    pub fn max_abs_diff(&self, other: &SimilarityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-iteration max absolute deltas observed while iterating, plus the
/// stopping outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    /// Max absolute change of the tag matrix per iteration, starting at 1.
    pub st_deltas: Vec<f64>,
    /// Max absolute change of the resource matrix per iteration.
    pub sr_deltas: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
    pub tolerance: f64,
}

impl ConvergenceTrace {
    /// `converged` holds exactly when both final deltas are within tolerance.
    pub fn is_consistent(&self) -> bool {
        match (self.st_deltas.last(), self.sr_deltas.last()) {
            (Some(&st), Some(&sr)) => {
                self.converged == (st <= self.tolerance && sr <= self.tolerance)
                    && self.iterations_run == self.st_deltas.len()
            }
            _ => !self.converged,
        }
    }
}
