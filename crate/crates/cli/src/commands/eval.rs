//! `folksim eval`: the precision/recall protocol over a propagation grid.

use std::path::PathBuf;

use clap::Args;
use folksim_core::eval::{evaluate_budgeted, write_report_csv, SplitConfig};
use folksim_core::ingest::ParseOptions;
use folksim_core::similarity::{IterationParams, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};

use crate::manifest::RunManifest;
use crate::util;

/// The propagation grid evaluated when --psi is not given.
pub const DEFAULT_PSI_GRID: [f64; 4] = [0.0, 0.15, 0.3, 0.6];

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Input triple file ("-" for stdin).
    #[arg(short, long)]
    pub input: PathBuf,

    /// Base path for outputs: writes BASE.csv, BASE.json and
    /// BASE.manifest.json.
    #[arg(short, long)]
    pub output: PathBuf,

    /// Propagation factor; repeat for a grid. Defaults to 0, 0.15, 0.3, 0.6.
    #[arg(long = "psi")]
    pub psi: Vec<f64>,

    #[arg(long, default_value_t = 0.9)]
    pub train_fraction: f64,

    #[arg(long, default_value_t = 10)]
    pub repetitions: u32,

    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    #[arg(long, default_value_t = 3)]
    pub min_bookmark_tags: usize,

    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    pub max_iter: usize,

    #[arg(long, value_parser = util::parse_delimiter, default_value = "\\t")]
    pub delimiter: char,

    #[arg(long)]
    pub case_fold: bool,

    #[arg(long)]
    pub skip_malformed: bool,
}

pub fn run(args: EvalArgs) -> anyhow::Result<()> {
    let grid: Vec<f64> = if args.psi.is_empty() {
        DEFAULT_PSI_GRID.to_vec()
    } else {
        args.psi.clone()
    };
    let params: Vec<IterationParams> = grid
        .iter()
        .map(|&psi| IterationParams::new(psi, args.tolerance, args.max_iter))
        .collect::<Result<_, _>>()?;

    let split = SplitConfig {
        train_fraction: args.train_fraction,
        repetitions: args.repetitions,
        seed: args.seed,
        min_bookmark_tags: args.min_bookmark_tags,
    };
    split.validate()?;

    let options = ParseOptions {
        delimiter: args.delimiter,
        skip_malformed: args.skip_malformed,
        case_fold_tags: args.case_fold,
    };

    let mut manifest = RunManifest::new(
        "eval",
        serde_json::json!({
            "psi_grid": grid,
            "tolerance": args.tolerance,
            "max_iterations": args.max_iter,
            "split": split,
            "case_fold": args.case_fold,
        }),
    )
    .input(&args.input);

    let (dataset, _) = manifest.time("load", || util::load_dataset(&args.input, options))?;
    let budget = util::memory_budget_bytes()?;
    let mut report = manifest.time("evaluate", || {
        evaluate_budgeted(&dataset, &split, &params, budget)
    })?;
    report.dataset_name = util::dataset_name(&args.input);

    let csv_path = util::with_extension_appended(&args.output, ".csv");
    let json_path = util::with_extension_appended(&args.output, ".json");
    let mut csv_buf = Vec::new();
    write_report_csv(&report, &mut csv_buf)?;
    util::write_file(&csv_path, &csv_buf)?;
    let mut json = report.to_json_pretty()?;
    json.push('\n');
    util::write_file(&json_path, json.as_bytes())?;
    manifest.output(&csv_path);
    manifest.output(&json_path);
    manifest.write_next_to(&args.output)?;

    if report.empty_repetitions > 0 {
        eprintln!(
            "warning: {} repetition(s) had no eligible test bookmarks and were excluded",
            report.empty_repetitions
        );
    }
    print!("{}", String::from_utf8_lossy(&csv_buf));
    eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}
