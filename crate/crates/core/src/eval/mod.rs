//! Retrieval evaluation: seeded train/test splits, per-bookmark query
//! construction, top-k retrieval, and precision/recall aggregation.
//!
//! Each test bookmark with enough tags becomes one query case: its tags are
//! split into a query half and an expected half, the query half retrieves
//! the k most similar train tags, and the overlap with the expected half is
//! scored. Cases average within a repetition and repetitions average into
//! the report.

mod report;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::model::{Bookmark, FolksonomyDataset, TagId};
use crate::similarity::{
    iterate_similarity_budgeted, top_k_similar, IterationParams, SimilarityError,
    DEFAULT_MEMORY_BUDGET_BYTES,
};

pub use report::write_report_csv;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid split config: {0}")]
    InvalidConfig(String),
    #[error("dataset has no bookmarks to split")]
    EmptyDataset,
    #[error("repetition {repetition}: {side} set is empty after the split")]
    EmptySplit { repetition: u32, side: &'static str },
    #[error("no iteration parameter sets supplied")]
    NoParams,
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Train/test split policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub repetitions: u32,
    pub seed: u64,
    /// Bookmarks with fewer tags stay in the test list but are ineligible
    /// as query cases.
    pub min_bookmark_tags: usize,
}

impl SplitConfig {
    /// Defaults: 90% train, 10 repetitions, 3-tag eligibility floor.
    pub fn new(seed: u64) -> Self {
        SplitConfig {
            train_fraction: 0.9,
            repetitions: 10,
            seed,
            min_bookmark_tags: 3,
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(EvalError::InvalidConfig(format!(
                "train_fraction must lie strictly between 0 and 1, got {}",
                self.train_fraction
            )));
        }
        if self.repetitions == 0 {
            return Err(EvalError::InvalidConfig(
                "repetitions must be at least 1".into(),
            ));
        }
        if self.min_bookmark_tags < 3 {
            return Err(EvalError::InvalidConfig(format!(
                "min_bookmark_tags must be at least 3, got {}",
                self.min_bookmark_tags
            )));
        }
        Ok(())
    }
}

/// One evaluation query: disjoint query and expected tag halves of a test
/// bookmark, with the query getting the odd tag when the count is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryCase {
    /// Index into the repetition's test bookmark list.
    pub bookmark: usize,
    pub tset_q: Vec<TagId>,
    pub tset_e: Vec<TagId>,
}

/// Deterministic stream for one (seed, repetition, purpose) triple.
fn derive_rng(seed: u64, repetition: u32, domain: &[u8; 8]) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..12].copy_from_slice(&repetition.to_le_bytes());
    bytes[16..24].copy_from_slice(domain);
    ChaCha8Rng::from_seed(bytes)
}

const SPLIT_DOMAIN: &[u8; 8] = b"bkmsplit";
const QUERY_DOMAIN: &[u8; 8] = b"querycse";

/// Uniform random bookmark-level split for one repetition.
///
/// The train side keeps the full id tables so tag ids align across splits;
/// the test side is the held-out bookmark list, ineligible bookmarks
/// included. The same (seed, repetition) always yields the same split.
pub fn split_dataset(
    dataset: &FolksonomyDataset,
    cfg: &SplitConfig,
    repetition: u32,
) -> Result<(FolksonomyDataset, Vec<Bookmark>), EvalError> {
    cfg.validate()?;
    let n = dataset.bookmarks().len();
    if n == 0 {
        return Err(EvalError::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = derive_rng(cfg.seed, repetition, SPLIT_DOMAIN);
    order.shuffle(&mut rng);

    let train_count = (n as f64 * cfg.train_fraction).round() as usize;
    if train_count == 0 {
        return Err(EvalError::EmptySplit {
            repetition,
            side: "train",
        });
    }
    if train_count >= n {
        return Err(EvalError::EmptySplit {
            repetition,
            side: "test",
        });
    }

    let mut train_idx = order[..train_count].to_vec();
    train_idx.sort_unstable();
    let mut test_idx = order[train_count..].to_vec();
    test_idx.sort_unstable();

    let train = dataset.with_bookmarks(&train_idx);
    let test = test_idx
        .iter()
        .map(|&i| dataset.bookmarks()[i].clone())
        .collect();
    Ok((train, test))
}

/// Builds the query/expected halves for one test bookmark, or `None` when
/// the bookmark has too few tags. Eligible bookmarks consume one shuffle
/// from the stream; ineligible ones consume nothing.
pub fn make_query_case(
    bookmark: &Bookmark,
    index: usize,
    rng: &mut ChaCha8Rng,
    min_bookmark_tags: usize,
) -> Option<QueryCase> {
    let m = bookmark.tags().len();
    if m < min_bookmark_tags {
        return None;
    }
    let mut tags = bookmark.tags().to_vec();
    tags.shuffle(rng);
    let q_len = m.div_ceil(2);
    let mut tset_q = tags[..q_len].to_vec();
    let mut tset_e = tags[q_len..].to_vec();
    tset_q.sort_unstable();
    tset_e.sort_unstable();
    Some(QueryCase {
        bookmark: index,
        tset_q,
        tset_e,
    })
}

/// Per-case precision and recall from the retrieved and expected sets.
/// An empty retrieval scores 0 precision.
fn case_scores(retrieved: &[TagId], expected: &[TagId]) -> (f64, f64) {
    let hits = retrieved
        .iter()
        .filter(|t| expected.binary_search(t).is_ok())
        .count() as f64;
    let precision = if retrieved.is_empty() {
        0.0
    } else {
        hits / retrieved.len() as f64
    };
    let recall = hits / expected.len() as f64;
    (precision, recall)
}

/// One repetition's outcome for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionResult {
    pub repetition: u32,
    pub test_bookmarks: usize,
    pub eligible_cases: usize,
    /// Unweighted case means; `None` when the repetition had no eligible
    /// cases.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub converged: bool,
    pub iterations_run: usize,
}

/// All repetitions for one propagation factor, with their averages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiResult {
    pub psi: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Means over repetitions that had eligible cases.
    pub mean_precision: Option<f64>,
    pub mean_recall: Option<f64>,
    pub per_repetition: Vec<RepetitionResult>,
}

/// The full evaluation output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub dataset_name: String,
    pub config: SplitConfig,
    /// Repetitions that produced no eligible query case and were excluded
    /// from the averages.
    pub empty_repetitions: u32,
    pub results: Vec<PsiResult>,
}

impl EvalReport {
    /// Deterministic pretty JSON rendering of the full report.
    pub fn to_json_pretty(&self) -> Result<String, EvalError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Runs the full protocol with the default memory budget.
pub fn evaluate(
    dataset: &FolksonomyDataset,
    cfg: &SplitConfig,
    params_list: &[IterationParams],
) -> Result<EvalReport, EvalError> {
    evaluate_budgeted(dataset, cfg, params_list, DEFAULT_MEMORY_BUDGET_BYTES)
}

/// Runs the full protocol: for every repetition, split, build the train
/// tag-resource matrix, iterate once per parameter set, retrieve for every
/// eligible case and aggregate precision/recall.
///
/// Query cases are built once per repetition, so every parameter set is
/// scored against identical cases.
pub fn evaluate_budgeted(
    dataset: &FolksonomyDataset,
    cfg: &SplitConfig,
    params_list: &[IterationParams],
    memory_budget_bytes: u64,
) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    if params_list.is_empty() {
        return Err(EvalError::NoParams);
    }

    let mut per_psi: Vec<Vec<RepetitionResult>> =
        vec![Vec::with_capacity(cfg.repetitions as usize); params_list.len()];
    let mut empty_repetitions = 0u32;

    for rep in 0..cfg.repetitions {
        let (train, test) = split_dataset(dataset, cfg, rep)?;
        let mut case_rng = derive_rng(cfg.seed, rep, QUERY_DOMAIN);
        let cases: Vec<QueryCase> = test
            .iter()
            .enumerate()
            .filter_map(|(i, b)| make_query_case(b, i, &mut case_rng, cfg.min_bookmark_tags))
            .collect();
        if cases.is_empty() {
            empty_repetitions += 1;
        }
        let tr = train.tr_matrix();

        for (slot, params) in params_list.iter().enumerate() {
            let (st, _, trace) = iterate_similarity_budgeted(&tr, params, memory_budget_bytes)?;
            let mut precision_sum = 0.0;
            let mut recall_sum = 0.0;
            for case in &cases {
                let k = case.tset_e.len();
                let retrieved: Vec<TagId> = top_k_similar(&st, &case.tset_q, k, &case.tset_q)?
                    .into_iter()
                    .map(|(t, _)| t)
                    .collect();
                let (p, r) = case_scores(&retrieved, &case.tset_e);
                if retrieved.len() == case.tset_e.len() && !retrieved.is_empty() {
                    // equal set sizes share the denominator
                    assert_eq!(p, r, "precision/recall coupling violated");
                }
                precision_sum += p;
                recall_sum += r;
            }
            let (precision, recall) = if cases.is_empty() {
                (None, None)
            } else {
                let n = cases.len() as f64;
                (Some(precision_sum / n), Some(recall_sum / n))
            };
            per_psi[slot].push(RepetitionResult {
                repetition: rep,
                test_bookmarks: test.len(),
                eligible_cases: cases.len(),
                precision,
                recall,
                converged: trace.converged,
                iterations_run: trace.iterations_run,
            });
        }
    }

    let results = params_list
        .iter()
        .zip(per_psi)
        .map(|(params, reps)| {
            let precisions: Vec<f64> = reps.iter().filter_map(|r| r.precision).collect();
            let recalls: Vec<f64> = reps.iter().filter_map(|r| r.recall).collect();
            PsiResult {
                psi: params.psi(),
                tolerance: params.tolerance(),
                max_iterations: params.max_iterations(),
                mean_precision: mean(&precisions),
                mean_recall: mean(&recalls),
                per_repetition: reps,
            }
        })
        .collect();

    Ok(EvalReport {
        dataset_name: String::from("dataset"),
        config: *cfg,
        empty_repetitions,
        results,
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}
