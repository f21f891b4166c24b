//! folksim: generate, inspect, and evaluate folksonomy tag similarity.

mod commands;
mod manifest;
mod util;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use folksim_core::eval::EvalError;
use folksim_core::ingest::IngestError;
use folksim_core::model::ModelError;
use folksim_core::similarity::SimilarityError;

#[derive(Parser)]
#[command(
    name = "folksim",
    version,
    about = "Tag similarity over sparse folksonomies: cosine and iterative mutual reinforcement",
    propagate_version = true
)]
struct Cli {
    /// Worker threads for the similarity kernels (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic folksonomy triple file
    Gen(commands::gen::GenArgs),
    /// Print dataset statistics as JSON
    Stats(commands::stats::StatsArgs),
    /// Compute tag similarities: query top-k neighbours or export the matrix
    Sim(commands::sim::SimArgs),
    /// Run the precision/recall evaluation over a propagation-factor grid
    Eval(commands::eval::EvalArgs),
}

/// Exit code classes. Config and usage mistakes share clap's code 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ErrorClass {
    Config,
    Parse,
    Compute,
    Io,
}

impl ErrorClass {
    fn code(self) -> u8 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Parse => 3,
            ErrorClass::Compute => 4,
            ErrorClass::Io => 5,
        }
    }
}

fn classify(err: &anyhow::Error) -> ErrorClass {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<IngestError>() {
            return match e {
                IngestError::WrongFieldCount { .. } | IngestError::EmptyField { .. } => {
                    ErrorClass::Parse
                }
                IngestError::InvalidConfig(_) | IngestError::UnserializableLabel { .. } => {
                    ErrorClass::Config
                }
                IngestError::Io(_) => ErrorClass::Io,
            };
        }
        if let Some(e) = cause.downcast_ref::<ModelError>() {
            return match e {
                ModelError::EmptyLabel { .. } => ErrorClass::Parse,
                _ => ErrorClass::Compute,
            };
        }
        if let Some(e) = cause.downcast_ref::<SimilarityError>() {
            return match e {
                SimilarityError::InvalidParams(_)
                | SimilarityError::EmptyQuery
                | SimilarityError::TagOutOfRange { .. }
                | SimilarityError::LabelCountMismatch { .. } => ErrorClass::Config,
                SimilarityError::CorruptSnapshot(_) => ErrorClass::Parse,
                SimilarityError::Io(_) | SimilarityError::Csv(_) => ErrorClass::Io,
                SimilarityError::EmptyMatrix
                | SimilarityError::MemoryBudget { .. }
                | SimilarityError::NonFinite { .. } => ErrorClass::Compute,
            };
        }
        if let Some(e) = cause.downcast_ref::<EvalError>() {
            return match e {
                EvalError::InvalidConfig(_) | EvalError::NoParams => ErrorClass::Config,
                EvalError::EmptyDataset
                | EvalError::EmptySplit { .. }
                | EvalError::Similarity(_) => ErrorClass::Compute,
                EvalError::Csv(_) | EvalError::Json(_) => ErrorClass::Io,
            };
        }
        if cause.downcast_ref::<util::UsageError>().is_some() {
            return ErrorClass::Config;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return ErrorClass::Io;
        }
    }
    ErrorClass::Compute
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()?;
    }
    match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Stats(args) => commands::stats::run(args),
        Command::Sim(args) => commands::sim::run(args),
        Command::Eval(args) => commands::eval::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let class = classify(&err);
            eprintln!("error: {err:#}");
            ExitCode::from(class.code())
        }
    }
}
