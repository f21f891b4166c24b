//! Cross-module checks: generator output against independent recounts, the
//! serialization round trip, and the evaluation protocol's evidence rules.

use folksim_core::eval::{evaluate, make_query_case, split_dataset, SplitConfig};
use folksim_core::ingest::{generate, parse_triples, write_triples, GeneratorConfig, ParseOptions};
use folksim_core::model::{build_dataset, TagId};
use folksim_core::similarity::{iterate_similarity, top_k_similar, IterationParams};

fn small_config() -> GeneratorConfig {
    GeneratorConfig {
        n_users: 60,
        n_resources: 150,
        n_tags: 120,
        n_bookmarks: 300,
        tags_per_bookmark: 2..=6,
        zipf_exponent: 1.1,
        seed: 42,
    }
}

#[test]
fn tr_total_matches_full_bookmark_rescan() {
    let d = generate(&small_config()).unwrap();
    // independent recount: walk every bookmark's tag set
    let rescan: u64 = d.bookmarks().iter().map(|b| b.tags().len() as u64).sum();
    assert_eq!(d.tr_matrix().total(), rescan);
    assert_eq!(d.tu_matrix().total(), rescan);
    assert_eq!(d.n_assignments(), rescan);
}

#[test]
fn tr_row_and_column_sums_count_assignments() {
    let d = generate(&small_config()).unwrap();
    let tr = d.tr_matrix();
    // row i: total assignment count of tag i, recounted from bookmarks
    let mut per_tag = vec![0u64; d.n_tags()];
    let mut per_resource = vec![0u64; d.n_resources()];
    for b in d.bookmarks() {
        for &t in b.tags() {
            per_tag[t.index()] += 1;
            per_resource[b.resource.index()] += 1;
        }
    }
    for (i, &expect) in per_tag.iter().enumerate() {
        assert_eq!(tr.row_sum(i), expect);
    }
    for (j, &expect) in per_resource.iter().enumerate() {
        assert_eq!(tr.col_sum(j), expect);
    }
}

#[test]
fn histogram_agrees_with_matrix_row_sums() {
    let d = generate(&small_config()).unwrap();
    let tr = d.tr_matrix();
    let hist = d.tag_frequency_histogram();
    let mut from_rows = std::collections::BTreeMap::new();
    for i in 0..d.n_tags() {
        *from_rows.entry(tr.row_sum(i)).or_insert(0u64) += 1;
    }
    assert_eq!(hist, from_rows);
}

#[test]
fn default_dataset_has_a_long_tail() {
    let d = generate(&GeneratorConfig::default()).unwrap();
    let hist = d.tag_frequency_histogram();
    let lt5: u64 = hist.iter().filter(|(&c, _)| c < 5).map(|(_, &n)| n).sum();
    assert!(
        lt5 * 2 > d.n_tags() as u64,
        "{lt5} of {} tags used fewer than 5 times is not a majority",
        d.n_tags()
    );
}

#[test]
fn generated_dataset_round_trips_through_the_triple_format() {
    let d = generate(&small_config()).unwrap();
    let mut buf = Vec::new();
    write_triples(&d, '\t', &mut buf).unwrap();
    let triples: Result<Vec<_>, _> =
        parse_triples(buf.as_slice(), ParseOptions::default()).collect();
    let reparsed = build_dataset(triples.unwrap()).unwrap();
    assert_eq!(reparsed, d);
}

#[test]
fn retrieval_uses_train_evidence_only() {
    // recompute one repetition by hand and match the report's numbers
    let d = generate(&small_config()).unwrap();
    let mut cfg = SplitConfig::new(5);
    cfg.repetitions = 1;
    let params = [IterationParams::with_psi(0.3).unwrap()];
    let report = evaluate(&d, &cfg, &params).unwrap();

    let (train, test) = split_dataset(&d, &cfg, 0).unwrap();
    assert!(train.bookmarks().len() < d.bookmarks().len());
    let tr = train.tr_matrix();
    let (st, _, _) = iterate_similarity(&tr, &params[0]).unwrap();

    // the query stream must match evaluate's: same derivation, same order
    let mut rng = {
        use rand::SeedableRng;
        let mut bytes = [0u8; 32];
        bytes[0..8].copy_from_slice(&cfg.seed.to_le_bytes());
        bytes[8..12].copy_from_slice(&0u32.to_le_bytes());
        bytes[16..24].copy_from_slice(b"querycse");
        rand_chacha::ChaCha8Rng::from_seed(bytes)
    };
    let mut precision_sum = 0.0;
    let mut cases = 0usize;
    for (i, b) in test.iter().enumerate() {
        let Some(case) = make_query_case(b, i, &mut rng, cfg.min_bookmark_tags) else {
            continue;
        };
        let k = case.tset_e.len();
        let got: Vec<TagId> = top_k_similar(&st, &case.tset_q, k, &case.tset_q)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        let hits = got
            .iter()
            .filter(|t| case.tset_e.binary_search(t).is_ok())
            .count() as f64;
        precision_sum += if got.is_empty() {
            0.0
        } else {
            hits / got.len() as f64
        };
        cases += 1;
    }
    let expected = precision_sum / cases as f64;
    let rep = &report.results[0].per_repetition[0];
    assert_eq!(rep.eligible_cases, cases);
    assert_eq!(rep.precision, Some(expected));
}

#[test]
fn results_are_identical_under_any_thread_count() {
    let d = generate(&small_config()).unwrap();
    let tr = d.tr_matrix();
    let params = IterationParams::with_psi(0.6).unwrap();
    let run = || {
        let (st, sr, trace) = iterate_similarity(&tr, &params).unwrap();
        (st, sr, trace)
    };
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    let quad = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(single.0.values(), quad.0.values());
    assert_eq!(single.1.values(), quad.1.values());
    assert_eq!(single.2, quad.2);
}

#[test]
fn evaluation_is_identical_under_any_thread_count() {
    let d = generate(&small_config()).unwrap();
    let mut cfg = SplitConfig::new(11);
    cfg.repetitions = 2;
    let params = [IterationParams::with_psi(0.15).unwrap()];
    let run = || evaluate(&d, &cfg, &params).unwrap();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    let quad = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(single, quad);
}
