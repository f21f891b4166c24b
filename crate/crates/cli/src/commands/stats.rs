//! `folksim stats`: dataset feature summary as JSON.

use std::path::PathBuf;

use clap::Args;
use folksim_core::ingest::ParseOptions;
use folksim_core::model::FolksonomyDataset;
use serde::Serialize;

use crate::util;

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Input triple file ("-" for stdin).
    #[arg(short, long)]
    pub input: PathBuf,

    /// Write the JSON here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_parser = util::parse_delimiter, default_value = "\\t")]
    pub delimiter: char,

    /// Lowercase tag labels while parsing.
    #[arg(long)]
    pub case_fold: bool,

    /// Skip malformed lines instead of failing; the count is reported.
    #[arg(long)]
    pub skip_malformed: bool,
}

#[derive(Debug, Serialize)]
struct DatasetStats {
    users: usize,
    resources: usize,
    tags: usize,
    bookmarks: usize,
    assignments: u64,
    /// Fraction of tags used fewer than 5 times.
    tag_usage_lt5_fraction: f64,
    /// Fraction of bookmarks carrying at most 3 tags.
    bookmarks_le3_tags_fraction: f64,
    skipped_lines: u64,
    /// Tag usage histogram: usage count -> number of tags.
    tag_frequency_histogram: std::collections::BTreeMap<u64, u64>,
}

fn compute(dataset: &FolksonomyDataset, skipped: u64) -> DatasetStats {
    let histogram = dataset.tag_frequency_histogram();
    let lt5: u64 = histogram
        .iter()
        .filter(|(&count, _)| count < 5)
        .map(|(_, &n)| n)
        .sum();
    let le3 = dataset
        .bookmarks()
        .iter()
        .filter(|b| b.tags().len() <= 3)
        .count();
    let n_tags = dataset.n_tags();
    let n_bookmarks = dataset.bookmarks().len();
    DatasetStats {
        users: dataset.n_users(),
        resources: dataset.n_resources(),
        tags: n_tags,
        bookmarks: n_bookmarks,
        assignments: dataset.n_assignments(),
        tag_usage_lt5_fraction: if n_tags == 0 {
            0.0
        } else {
            lt5 as f64 / n_tags as f64
        },
        bookmarks_le3_tags_fraction: if n_bookmarks == 0 {
            0.0
        } else {
            le3 as f64 / n_bookmarks as f64
        },
        skipped_lines: skipped,
        tag_frequency_histogram: histogram,
    }
}

pub fn run(args: StatsArgs) -> anyhow::Result<()> {
    let options = ParseOptions {
        delimiter: args.delimiter,
        skip_malformed: args.skip_malformed,
        case_fold_tags: args.case_fold,
    };
    let (dataset, parse_stats) = util::load_dataset(&args.input, options)?;
    let stats = compute(&dataset, parse_stats.skipped);
    let mut json = serde_json::to_string_pretty(&stats)?;
    json.push('\n');
    match &args.output {
        Some(path) => util::write_file(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use folksim_core::model::{build_dataset, Triple};

    #[test]
    fn example_fixture_counts() {
        let d = build_dataset([
            Triple::new("u1", "r1", "t1"),
            Triple::new("u1", "r1", "t2"),
            Triple::new("u2", "r1", "t1"),
        ])
        .unwrap();
        let s = compute(&d, 0);
        assert_eq!((s.users, s.resources, s.tags, s.bookmarks), (2, 1, 2, 2));
        assert_eq!(s.assignments, 3);
        assert_eq!(s.tag_usage_lt5_fraction, 1.0);
        assert_eq!(s.bookmarks_le3_tags_fraction, 1.0);
    }

    #[test]
    fn empty_dataset_is_all_zero() {
        let d = build_dataset([]).unwrap();
        let s = compute(&d, 0);
        assert_eq!((s.users, s.resources, s.tags, s.bookmarks), (0, 0, 0, 0));
        assert_eq!(s.assignments, 0);
        assert_eq!(s.tag_usage_lt5_fraction, 0.0);
        assert_eq!(s.bookmarks_le3_tags_fraction, 0.0);
    }
}
