//! Reference path for the iteration engine: one update step evaluated as a
//! literal quadruple sum, with no algebraic shortcuts. Quartic in the matrix
//! dimensions, so it is only suitable for small instances; it exists to
//! check the matrix-product engine against an independent route.

use crate::model::SparseCountMatrix;

use super::{IterationParams, SimilarityMatrix};

/// One iteration of the mutual-reinforcement update by direct summation.
///
/// For every output pair the gated sum walks all index pairs (i, j), weighing
/// the previous similarity by 1 on the diagonal and by psi off it, then
/// normalizes by the square roots of the diagonal. Pairs with a zero
/// normalizer map to 0.
pub fn direct_sum_step(
    tr: &SparseCountMatrix,
    st_prev: &SimilarityMatrix,
    sr_prev: &SimilarityMatrix,
    params: &IterationParams,
) -> (SimilarityMatrix, SimilarityMatrix) {
    let (nt, nr) = (tr.rows(), tr.cols());
    assert_eq!(st_prev.dim(), nt, "tag matrix dimension mismatch");
    assert_eq!(sr_prev.dim(), nr, "resource matrix dimension mismatch");
    let psi = params.psi();

    let mut dense = vec![0.0f64; nt * nr];
    for a in 0..nt {
        for (j, v) in tr.row(a) {
            dense[a * nr + j as usize] = v as f64;
        }
    }
    let gate = |i: usize, j: usize| if i == j { 1.0 } else { psi };

    let mut st_raw = vec![0.0f64; nt * nt];
    for a in 0..nt {
        for b in 0..nt {
            let mut sum = 0.0;
            for i in 0..nr {
                for j in 0..nr {
                    sum += dense[a * nr + i] * gate(i, j) * sr_prev.get(i, j) * dense[b * nr + j];
                }
            }
            st_raw[a * nt + b] = sum;
        }
    }

    let mut sr_raw = vec![0.0f64; nr * nr];
    for a in 0..nr {
        for b in 0..nr {
            let mut sum = 0.0;
            for i in 0..nt {
                for j in 0..nt {
                    sum += dense[i * nr + a] * gate(i, j) * st_prev.get(i, j) * dense[j * nr + b];
                }
            }
            sr_raw[a * nr + b] = sum;
        }
    }

    (normalize(nt, st_raw), normalize(nr, sr_raw))
}

fn normalize(n: usize, raw: Vec<f64>) -> SimilarityMatrix {
    let mut values = vec![0.0; n * n];
    let live: Vec<bool> = (0..n).map(|a| raw[a * n + a] > 0.0).collect();
    for a in 0..n {
        for b in 0..n {
            let denom = raw[a * n + a].sqrt() * raw[b * n + b].sqrt();
            values[a * n + b] = if denom > 0.0 {
                raw[a * n + b] / denom
            } else {
                0.0
            };
        }
    }
    SimilarityMatrix::from_parts(n, values, live)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{cosine_tag_similarity, iterate_similarity};
    use approx::assert_abs_diff_eq;

    fn fixture() -> SparseCountMatrix {
        SparseCountMatrix::from_triplets(2, 3, [(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1)])
    }

    #[test]
    fn identity_seed_with_psi_zero_reproduces_cosine() {
        let tr = fixture();
        let params = IterationParams::new(0.0, 1e-6, 1).unwrap();
        let (st, _) = direct_sum_step(
            &tr,
            &SimilarityMatrix::identity(2),
            &SimilarityMatrix::identity(3),
            &params,
        );
        let cosine = cosine_tag_similarity(&tr);
        assert!(st.max_abs_diff(&cosine) <= 1e-12);
    }

    #[test]
    fn fixture_matches_engine_iteration_for_iteration() {
        let tr = fixture();
        for psi in [0.0, 0.3, 0.6, 1.0] {
            let params = IterationParams::new(psi, 1e-300, 1).unwrap();
            let mut st = SimilarityMatrix::identity(2);
            let mut sr = SimilarityMatrix::identity(3);
            for iters in 1..=4 {
                let (st_next, sr_next) = direct_sum_step(&tr, &st, &sr, &params);
                let engine_params = IterationParams::new(psi, 1e-300, iters).unwrap();
                let (st_eng, sr_eng, _) = iterate_similarity(&tr, &engine_params).unwrap();
                assert!(st_eng.max_abs_diff(&st_next) <= 1e-12);
                assert!(sr_eng.max_abs_diff(&sr_next) <= 1e-12);
                st = st_next;
                sr = sr_next;
            }
        }
    }

    #[test]
    fn fixture_closed_forms() {
        let tr = fixture();
        let params = IterationParams::new(0.6, 1e-300, 1).unwrap();
        let (st1, sr1) = direct_sum_step(
            &tr,
            &SimilarityMatrix::identity(2),
            &SimilarityMatrix::identity(3),
            &params,
        );
        assert_abs_diff_eq!(
            sr1.get(0, 1),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        let (st2, _) = direct_sum_step(&tr, &st1, &sr1, &params);
        let expected = (1.0 + 0.6 * 2f64.sqrt()) / (2.0 + 0.6 * 2f64.sqrt());
        assert_abs_diff_eq!(st2.get(0, 1), expected, epsilon = 1e-12);
    }

    #[test]
    fn seeded_random_instance_matches_engine() {
        // 5x7 with counts in 0..3, psi = 0.3, three iterations
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(170);
        let mut triplets = Vec::new();
        for r in 0..5u32 {
            for c in 0..7u32 {
                let v: u32 = rng.gen_range(0..3);
                if v > 0 {
                    triplets.push((r, c, v));
                }
            }
        }
        let tr = SparseCountMatrix::from_triplets(5, 7, triplets);
        let params = IterationParams::new(0.3, 1e-300, 1).unwrap();
        let mut st = SimilarityMatrix::identity(5);
        let mut sr = SimilarityMatrix::identity(7);
        for iters in 1..=3 {
            let (st_next, sr_next) = direct_sum_step(&tr, &st, &sr, &params);
            let engine_params = IterationParams::new(0.3, 1e-300, iters).unwrap();
            let (st_eng, sr_eng, _) = iterate_similarity(&tr, &engine_params).unwrap();
            assert!(st_eng.max_abs_diff(&st_next) <= 1e-9);
            assert!(sr_eng.max_abs_diff(&sr_next) <= 1e-9);
            st = st_next;
            sr = sr_next;
        }
    }
}
