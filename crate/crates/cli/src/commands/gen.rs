//! `folksim gen`: synthetic dataset generation.

use std::path::PathBuf;

use clap::Args;
use folksim_core::ingest::{generate, write_triples, GeneratorConfig};

use crate::manifest::RunManifest;
use crate::util;

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output triple file.
    #[arg(short, long)]
    pub output: PathBuf,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = GeneratorConfig::default().n_users)]
    pub users: usize,

    #[arg(long, default_value_t = GeneratorConfig::default().n_resources)]
    pub resources: usize,

    #[arg(long, default_value_t = GeneratorConfig::default().n_tags)]
    pub tags: usize,

    #[arg(long, default_value_t = GeneratorConfig::default().n_bookmarks)]
    pub bookmarks: usize,

    /// Tags drawn per bookmark, e.g. 2..=6.
    #[arg(long, value_parser = util::parse_inclusive_range, default_value = "2..=6")]
    pub tags_per_bookmark: std::ops::RangeInclusive<usize>,

    #[arg(long, default_value_t = GeneratorConfig::default().zipf_exponent)]
    pub zipf_exponent: f64,

    /// Field delimiter for the output file.
    #[arg(long, value_parser = util::parse_delimiter, default_value = "\\t")]
    pub delimiter: char,
}

pub fn run(args: GenArgs) -> anyhow::Result<()> {
    let cfg = GeneratorConfig {
        n_users: args.users,
        n_resources: args.resources,
        n_tags: args.tags,
        n_bookmarks: args.bookmarks,
        tags_per_bookmark: args.tags_per_bookmark.clone(),
        zipf_exponent: args.zipf_exponent,
        seed: args.seed,
    };

    let mut manifest = RunManifest::new(
        "gen",
        serde_json::json!({ "generator": cfg, "delimiter": args.delimiter }),
    );
    let dataset = manifest.time("generate", || generate(&cfg))?;

    let mut buf = Vec::new();
    let lines = manifest.time("serialize", || {
        write_triples(&dataset, args.delimiter, &mut buf)
    })?;
    util::write_file(&args.output, &buf)?;
    manifest.output(&args.output);
    manifest.write_next_to(&args.output)?;

    eprintln!(
        "wrote {} assignments in {} bookmarks ({} users, {} resources, {} tags) to {}",
        lines,
        dataset.bookmarks().len(),
        dataset.n_users(),
        dataset.n_resources(),
        dataset.n_tags(),
        args.output.display()
    );
    Ok(())
}
