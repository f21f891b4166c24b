//! Top-k retrieval over a tag similarity matrix.

use crate::model::TagId;

use super::{SimilarityError, SimilarityMatrix};

/// The k tags most similar to a query tag set.
///
/// A candidate's score is the sum of its similarities to every query tag.
/// Query tags and explicitly excluded tags are never candidates, and only
/// candidates with a strictly positive score are returned, so the result may
/// be shorter than k. Ties break by ascending tag id.
pub fn top_k_similar(
    st: &SimilarityMatrix,
    query: &[TagId],
    k: usize,
    excluded: &[TagId],
) -> Result<Vec<(TagId, f64)>, SimilarityError> {
    if query.is_empty() {
        return Err(SimilarityError::EmptyQuery);
    }
    let dim = st.dim();
    for &t in query.iter().chain(excluded) {
        if t.index() >= dim {
            return Err(SimilarityError::TagOutOfRange { id: t.0, dim });
        }
    }
    if k == 0 {
        return Ok(Vec::new());
    }

    let mut skip = vec![false; dim];
    for &t in query.iter().chain(excluded) {
        skip[t.index()] = true;
    }

    // the matrix is symmetric, so summing query rows scores every candidate
    let mut scores = vec![0.0f64; dim];
    let mut seen_query = vec![false; dim];
    for &q in query {
        if std::mem::replace(&mut seen_query[q.index()], true) {
            continue; // duplicate query tag
        }
        for (acc, &s) in scores.iter_mut().zip(st.row(q.index())) {
            *acc += s;
        }
    }

    let mut candidates: Vec<(TagId, f64)> = scores
        .into_iter()
        .enumerate()
        .filter(|&(t, score)| !skip[t] && score > 0.0)
        .map(|(t, score)| (TagId(t as u32), score))
        .collect();
    candidates.sort_unstable_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("similarity scores are finite")
            .then(a.0.cmp(&b.0))
    });
    candidates.truncate(k);
    Ok(candidates)
}
