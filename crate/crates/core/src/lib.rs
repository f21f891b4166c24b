//! Tag and resource similarity over large sparse folksonomies.
//!
//! A folksonomy is a set of (user, resource, tag) assignments. This crate
//! models such datasets, computes tag-tag and resource-resource similarity
//! with either plain cosine or an iterative mutual-reinforcement metric
//! (two tags are similar if they label similar resources, and vice versa),
//! generates seeded synthetic folksonomies with power-law tag usage, and
//! reproduces a precision/recall retrieval evaluation on top of them.

pub mod eval;
pub mod ingest;
pub mod model;
pub mod similarity;

pub use model::{
    Bookmark, FolksonomyDataset, ModelError, ResourceId, SparseCountMatrix, TagId, Triple, UserId,
};
pub use similarity::{ConvergenceTrace, IterationParams, SimilarityError, SimilarityMatrix};
