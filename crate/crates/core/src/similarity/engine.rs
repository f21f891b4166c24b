//! Cosine similarity and the iterative mutual-reinforcement engine.
//!
//! The iterates are dense symmetric matrices updated in lockstep: within an
//! iteration both sides consume the previous iteration's matrices, so the
//! update is order-independent. Every output row is computed independently
//! with a fixed reduction order, which keeps results bit-identical under any
//! thread count.

use rayon::prelude::*;

use crate::model::SparseCountMatrix;

use super::{
    ConvergenceTrace, IterationParams, SimilarityError, SimilarityMatrix,
    DEFAULT_MEMORY_BUDGET_BYTES,
};

/// One side of the tag-resource matrix: CSR arrays viewed as the rows of an
/// operator with `n_out` rows over `n_in` columns. The tag side comes from
/// CSR, the resource side from CSC.
struct Axis<'a> {
    n_out: usize,
    n_in: usize,
    ptr: &'a [usize],
    idx: &'a [u32],
    val: &'a [u32],
}

impl<'a> Axis<'a> {
    #[inline]
    fn row(&self, r: usize) -> (&'a [u32], &'a [u32]) {
        let span = self.ptr[r]..self.ptr[r + 1];
        (&self.idx[span.clone()], &self.val[span])
    }

    fn live(&self) -> Vec<bool> {
        (0..self.n_out)
            .map(|r| self.ptr[r + 1] > self.ptr[r])
            .collect()
    }
}

fn tag_axis(tr: &SparseCountMatrix) -> Axis<'_> {
    let (ptr, idx, val) = tr.csr_parts();
    Axis {
        n_out: tr.rows(),
        n_in: tr.cols(),
        ptr,
        idx,
        val,
    }
}

fn resource_axis(tr: &SparseCountMatrix) -> Axis<'_> {
    let (ptr, idx, val) = tr.csc_parts();
    Axis {
        n_out: tr.cols(),
        n_in: tr.rows(),
        ptr,
        idx,
        val,
    }
}

/// mix[o][..] = sum over stored (j, v) of row o: v * prev[j][..]
fn mix_pass(axis: &Axis, prev: &[f64], mix: &mut [f64]) {
    let n_in = axis.n_in;
    mix[..axis.n_out * n_in]
        .par_chunks_mut(n_in)
        .enumerate()
        .for_each(|(o, out_row)| {
            out_row.fill(0.0);
            let (cols, vals) = axis.row(o);
            for (&j, &v) in cols.iter().zip(vals) {
                let w = v as f64;
                let src = &prev[j as usize * n_in..(j as usize + 1) * n_in];
                for (acc, s) in out_row.iter_mut().zip(src) {
                    *acc += w * *s;
                }
            }
        });
}

/// next[a][b] = dot(mix row a, sparse row b)
fn product_pass(axis: &Axis, mix: &[f64], next: &mut [f64]) {
    let n_out = axis.n_out;
    let n_in = axis.n_in;
    next.par_chunks_mut(n_out)
        .enumerate()
        .for_each(|(a, out_row)| {
            let mix_row = &mix[a * n_in..(a + 1) * n_in];
            for (b, out) in out_row.iter_mut().enumerate() {
                let (cols, vals) = axis.row(b);
                let mut acc = 0.0;
                for (&j, &v) in cols.iter().zip(vals) {
                    acc += mix_row[j as usize] * (v as f64);
                }
                *out = acc;
            }
        });
}

/// Densify the operator rows into `out` (n_out x n_in).
fn densify(axis: &Axis, out: &mut [f64]) {
    let n_in = axis.n_in;
    out[..axis.n_out * n_in]
        .par_chunks_mut(n_in)
        .enumerate()
        .for_each(|(o, row)| {
            row.fill(0.0);
            let (cols, vals) = axis.row(o);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j as usize] = v as f64;
            }
        });
}

/// Combine the propagation-gated kernel and normalize in place.
///
/// On entry `next` holds M = TR * prev * TR^t (ignored when psi = 0) and
/// `gram` holds TR * TR^t. The combined kernel is (1-psi)*gram + psi*M;
/// entries are scaled by the inverse square roots of its diagonal. A zero
/// diagonal (no assignments) maps the whole row and column, diagonal
/// included, to 0.
fn normalize_combined(
    gram: &[f64],
    next: &mut [f64],
    inv: &mut [f64],
    psi: f64,
    live: &[bool],
    side: &'static str,
    iteration: usize,
) -> Result<(), SimilarityError> {
    let n = live.len();
    for a in 0..n {
        let d = if psi == 0.0 {
            gram[a * n + a]
        } else {
            (1.0 - psi) * gram[a * n + a] + psi * next[a * n + a]
        };
        if !d.is_finite() {
            return Err(SimilarityError::NonFinite { side, iteration });
        }
        inv[a] = if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 };
        debug_assert_eq!(live[a], d > 0.0);
    }
    let inv_ref: &[f64] = inv;
    next.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        let ia = inv_ref[a];
        if psi == 0.0 {
            let gram_row = &gram[a * n..(a + 1) * n];
            for b in 0..n {
                row[b] = gram_row[b] * ia * inv_ref[b];
            }
        } else {
            let gram_row = &gram[a * n..(a + 1) * n];
            for b in 0..n {
                let combined = (1.0 - psi) * gram_row[b] + psi * row[b];
                row[b] = combined * ia * inv_ref[b];
            }
        }
        // the diagonal is 1 by construction for live ids; set it exactly
        row[a] = if live[a] { 1.0 } else { 0.0 };
    });
    Ok(())
}

/// Cancel floating-point drift between (a, b) and (b, a).
fn symmetrize(values: &mut [f64], n: usize) {
    for a in 0..n {
        for b in (a + 1)..n {
            let avg = 0.5 * (values[a * n + b] + values[b * n + a]);
            values[a * n + b] = avg;
            values[b * n + a] = avg;
        }
    }
}

fn max_delta(next: &[f64], prev: &[f64]) -> f64 {
    next.par_iter()
        .zip(prev.par_iter())
        .map(|(a, b)| (a - b).abs())
        .reduce(|| 0.0, f64::max)
}

fn all_finite(values: &[f64]) -> bool {
    values.par_iter().all(|v| v.is_finite())
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Bytes of dense working memory the iteration will allocate.
pub(crate) fn required_bytes(n_tags: usize, n_resources: usize) -> u64 {
    let squares = 3 * (n_tags * n_tags + n_resources * n_resources);
    let mix = n_tags * n_resources;
    8 * (squares + mix + n_tags + n_resources) as u64
}

/// Cosine similarity between tag rows of the tag-resource matrix.
///
/// Entry (i, j) is the inner product of rows i and j scaled by their norms.
/// A tag with no assignments has similarity 0 to everything, its own
/// diagonal included.
pub fn cosine_tag_similarity(tr: &SparseCountMatrix) -> SimilarityMatrix {
    let n = tr.rows();
    let norms: Vec<f64> = (0..n)
        .map(|a| {
            tr.row(a)
                .map(|(_, v)| {
                    let x = v as f64;
                    x * x
                })
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let live: Vec<bool> = norms.iter().map(|&x| x > 0.0).collect();

    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for (b, out) in row.iter_mut().enumerate() {
            if a == b {
                *out = if live[a] { 1.0 } else { 0.0 };
            } else if live[a] && live[b] {
                *out = sparse_dot(tr, a, b) / (norms[a] * norms[b]);
            } else {
                *out = 0.0;
            }
        }
    });
    SimilarityMatrix::from_parts(n, values, live)
}

/// Merge-join dot product of two sorted sparse rows. The accumulation order
/// depends only on the merged column sequence, so dot(a, b) and dot(b, a)
/// are bit-identical.
fn sparse_dot(tr: &SparseCountMatrix, a: usize, b: usize) -> f64 {
    let (ptr, idx, val) = tr.csr_parts();
    let (sa, ea) = (ptr[a], ptr[a + 1]);
    let (sb, eb) = (ptr[b], ptr[b + 1]);
    let (mut i, mut j) = (sa, sb);
    let mut acc = 0.0;
    while i < ea && j < eb {
        match idx[i].cmp(&idx[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += (val[i] as f64) * (val[j] as f64);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Runs the mutual-reinforcement iteration with the default memory budget.
pub fn iterate_similarity(
    tr: &SparseCountMatrix,
    params: &IterationParams,
) -> Result<(SimilarityMatrix, SimilarityMatrix, ConvergenceTrace), SimilarityError> {
    iterate_similarity_budgeted(tr, params, DEFAULT_MEMORY_BUDGET_BYTES)
}

/// Runs the mutual-reinforcement iteration.
///
/// Starting from identity seeds, each iteration rebuilds the tag-tag and
/// resource-resource similarity matrices from the previous pair and
/// normalizes them to unit diagonal. Iteration stops when the max absolute
/// element change of both matrices is within tolerance, or at the cap.
pub fn iterate_similarity_budgeted(
    tr: &SparseCountMatrix,
    params: &IterationParams,
    memory_budget_bytes: u64,
) -> Result<(SimilarityMatrix, SimilarityMatrix, ConvergenceTrace), SimilarityError> {
    let (nt, nr) = (tr.rows(), tr.cols());
    if nt == 0 || nr == 0 {
        return Err(SimilarityError::EmptyMatrix);
    }
    let required = required_bytes(nt, nr);
    if required > memory_budget_bytes {
        return Err(SimilarityError::MemoryBudget {
            required_bytes: required,
            budget_bytes: memory_budget_bytes,
        });
    }

    let axis_t = tag_axis(tr);
    let axis_r = resource_axis(tr);
    let live_t = axis_t.live();
    let live_r = axis_r.live();
    let psi = params.psi();

    let mut mix = vec![0.0; nt * nr];

    // gram kernels TR*TR^t and TR^t*TR, the psi-independent part
    let mut gram_t = vec![0.0; nt * nt];
    densify(&axis_t, &mut mix);
    product_pass(&axis_t, &mix, &mut gram_t);
    let mut gram_r = vec![0.0; nr * nr];
    densify(&axis_r, &mut mix);
    product_pass(&axis_r, &mix, &mut gram_r);

    let mut st_prev = identity(nt);
    let mut sr_prev = identity(nr);
    let mut st_next = vec![0.0; nt * nt];
    let mut sr_next = vec![0.0; nr * nr];
    let mut inv_t = vec![0.0; nt];
    let mut inv_r = vec![0.0; nr];

    let mut trace = ConvergenceTrace {
        st_deltas: Vec::new(),
        sr_deltas: Vec::new(),
        iterations_run: 0,
        converged: false,
        tolerance: params.tolerance(),
    };

    for k in 1..=params.max_iterations() {
        // tag side from the previous resource matrix
        if psi > 0.0 {
            mix_pass(&axis_t, &sr_prev, &mut mix);
            product_pass(&axis_t, &mix, &mut st_next);
        }
        normalize_combined(&gram_t, &mut st_next, &mut inv_t, psi, &live_t, "tag", k)?;
        symmetrize(&mut st_next, nt);

        // resource side from the previous tag matrix (simultaneous update)
        if psi > 0.0 {
            mix_pass(&axis_r, &st_prev, &mut mix);
            product_pass(&axis_r, &mix, &mut sr_next);
        }
        normalize_combined(
            &gram_r,
            &mut sr_next,
            &mut inv_r,
            psi,
            &live_r,
            "resource",
            k,
        )?;
        symmetrize(&mut sr_next, nr);

        if !all_finite(&st_next) {
            return Err(SimilarityError::NonFinite {
                side: "tag",
                iteration: k,
            });
        }
        if !all_finite(&sr_next) {
            return Err(SimilarityError::NonFinite {
                side: "resource",
                iteration: k,
            });
        }

        let delta_st = max_delta(&st_next, &st_prev);
        let delta_sr = max_delta(&sr_next, &sr_prev);
        trace.st_deltas.push(delta_st);
        trace.sr_deltas.push(delta_sr);
        trace.iterations_run = k;

        std::mem::swap(&mut st_prev, &mut st_next);
        std::mem::swap(&mut sr_prev, &mut sr_next);

        if delta_st <= params.tolerance() && delta_sr <= params.tolerance() {
            trace.converged = true;
            break;
        }
    }

    let st = SimilarityMatrix::from_parts(nt, st_prev, live_t);
    let sr = SimilarityMatrix::from_parts(nr, sr_prev, live_r);
    Ok((st, sr, trace))
}
