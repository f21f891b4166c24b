//! `folksim sim`: iterate similarities, then answer a top-k query or export
//! the tag matrix.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use folksim_core::ingest::ParseOptions;
use folksim_core::model::TagId;
use folksim_core::similarity::{
    iterate_similarity_budgeted, top_k_similar, write_matrix_csv, write_snapshot, ConvergenceTrace,
    IterationParams, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};

use crate::manifest::RunManifest;
use crate::util;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Input triple file ("-" for stdin).
    #[arg(short, long)]
    pub input: PathBuf,

    /// Propagation factor in [0, 1]; 0 is plain cosine.
    #[arg(long, default_value_t = 0.3)]
    pub psi: f64,

    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iter: usize,

    /// Query tag label; repeat for a multi-tag query.
    #[arg(long = "query", short = 'q')]
    pub query: Vec<String>,

    /// Neighbours to retrieve for the query.
    #[arg(short, long, default_value_t = 10)]
    pub k: usize,

    /// Extra tag labels to exclude from the candidates.
    #[arg(long = "exclude")]
    pub exclude: Vec<String>,

    /// Export the full tag similarity matrix here (.csv for labelled CSV,
    /// anything else for the binary snapshot).
    #[arg(long)]
    pub export_matrix: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    #[arg(long, value_parser = util::parse_delimiter, default_value = "\\t")]
    pub delimiter: char,

    #[arg(long)]
    pub case_fold: bool,

    #[arg(long)]
    pub skip_malformed: bool,
}

fn resolve_tags(
    labels: &[String],
    dataset: &folksim_core::model::FolksonomyDataset,
) -> anyhow::Result<Vec<TagId>> {
    let mut out = Vec::with_capacity(labels.len());
    for label in labels {
        match dataset.tag_id(label) {
            Some(id) => out.push(id),
            None => {
                let suggestions =
                    util::near_misses(label, dataset.tags().labels().iter().map(String::as_str));
                let hint = if suggestions.is_empty() {
                    String::new()
                } else {
                    format!("; did you mean one of {suggestions:?}")
                };
                return Err(util::usage(format!("unknown tag label {label:?}{hint}")));
            }
        }
    }
    Ok(out)
}

fn print_trace(trace: &ConvergenceTrace) {
    eprintln!(
        "converged={} iterations_run={} tolerance={:e}",
        trace.converged, trace.iterations_run, trace.tolerance
    );
    for (i, (st, sr)) in trace.st_deltas.iter().zip(&trace.sr_deltas).enumerate() {
        eprintln!(
            "  iteration {:>2}: st_delta={st:.3e} sr_delta={sr:.3e}",
            i + 1
        );
    }
}

pub fn run(args: SimArgs) -> anyhow::Result<()> {
    if args.query.is_empty() && args.export_matrix.is_none() {
        return Err(util::usage(
            "nothing to do: pass --query LABEL (repeatable) or --export-matrix PATH",
        ));
    }
    let params = IterationParams::new(args.psi, args.tolerance, args.max_iter)?;
    let options = ParseOptions {
        delimiter: args.delimiter,
        skip_malformed: args.skip_malformed,
        case_fold_tags: args.case_fold,
    };

    let mut manifest = RunManifest::new(
        "sim",
        serde_json::json!({
            "psi": args.psi,
            "tolerance": args.tolerance,
            "max_iterations": args.max_iter,
            "k": args.k,
            "query": args.query,
            "exclude": args.exclude,
            "case_fold": args.case_fold,
        }),
    )
    .input(&args.input);

    let (dataset, _) = manifest.time("load", || util::load_dataset(&args.input, options))?;
    let query = resolve_tags(&args.query, &dataset)?;
    let exclude = resolve_tags(&args.exclude, &dataset)?;

    let tr = manifest.time("tr_matrix", || dataset.tr_matrix());
    let budget = util::memory_budget_bytes()?;
    let (st, _, trace) = manifest.time("iterate", || {
        iterate_similarity_budgeted(&tr, &params, budget)
    })?;
    print_trace(&trace);

    if let Some(path) = &args.export_matrix {
        manifest.time("export", || -> anyhow::Result<()> {
            let mut buf = Vec::new();
            if path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
            {
                write_matrix_csv(&st, dataset.tags().labels(), &mut buf)?;
            } else {
                write_snapshot(&st, &mut buf)?;
            }
            util::write_file(path, &buf)
        })?;
        manifest.output(path);
    }

    if !query.is_empty() {
        let ranked = top_k_similar(&st, &query, args.k, &exclude)?;
        let rows: Vec<(String, f64)> = ranked
            .into_iter()
            .map(|(t, score)| (dataset.tag_label(t).unwrap_or("?").to_owned(), score))
            .collect();
        match args.format {
            OutputFormat::Text => {
                for (label, score) in &rows {
                    println!("{label}\t{score:.9}");
                }
            }
            OutputFormat::Json => {
                let items: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|(label, score)| serde_json::json!({ "tag": label, "score": score }))
                    .collect();
                println!("{}", serde_json::to_string_pretty(&items)?);
            }
            OutputFormat::Csv => {
                println!("tag,score");
                for (label, score) in &rows {
                    println!("{label},{score:.9}");
                }
            }
        }
    }

    if let Some(path) = &args.export_matrix {
        manifest.write_next_to(path)?;
    }
    Ok(())
}
