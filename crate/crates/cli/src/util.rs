//! Shared input handling and small helpers for the commands.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use anyhow::Context;
use folksim_core::ingest::{parse_triples, ParseOptions, ParseStats};
use folksim_core::model::{build_dataset, FolksonomyDataset};
use folksim_core::similarity::DEFAULT_MEMORY_BUDGET_BYTES;

/// Command-level misuse that clap cannot catch (bad flag combinations,
/// unknown labels, malformed ranges).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Parses a --delimiter value: a single character, or the escapes \t and \0
/// spelled out, or the words "tab" / "comma" / "space".
pub fn parse_delimiter(raw: &str) -> Result<char, String> {
    match raw {
        "\\t" | "tab" => Ok('\t'),
        "comma" => Ok(','),
        "space" => Ok(' '),
        _ => {
            let mut chars = raw.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(format!("delimiter must be one character, got {raw:?}")),
            }
        }
    }
}

/// Parses an inclusive integer range written as "lo..hi" or "lo..=hi".
pub fn parse_inclusive_range(raw: &str) -> Result<std::ops::RangeInclusive<usize>, String> {
    let (lo, hi) = raw
        .split_once("..=")
        .or_else(|| raw.split_once(".."))
        .ok_or_else(|| format!("expected a range like 2..=6, got {raw:?}"))?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad range end {hi:?}"))?;
    Ok(lo..=hi)
}

pub fn reader_for(path: &Path) -> anyhow::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        Ok(Box::new(BufReader::new(std::io::stdin())))
    } else {
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Reads and interns a triple file.
pub fn load_dataset(
    path: &Path,
    options: ParseOptions,
) -> anyhow::Result<(FolksonomyDataset, ParseStats)> {
    let reader = reader_for(path)?;
    let mut parser = parse_triples(reader, options);
    let mut triples = Vec::new();
    for item in &mut parser {
        triples.push(item.with_context(|| format!("parsing {}", path.display()))?);
    }
    let stats = parser.stats();
    let dataset = build_dataset(triples)?;
    Ok((dataset, stats))
}

/// The dense-iterate memory budget: FOLKSIM_MEMORY_BUDGET_MB (integer
/// megabytes) when set, the library default otherwise.
pub fn memory_budget_bytes() -> anyhow::Result<u64> {
    match std::env::var("FOLKSIM_MEMORY_BUDGET_MB") {
        Ok(raw) => {
            let mb: u64 = raw.trim().parse().map_err(|_| {
                usage(format!(
                    "FOLKSIM_MEMORY_BUDGET_MB must be an integer megabyte count, got {raw:?}"
                ))
            })?;
            Ok(mb * 1024 * 1024)
        }
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_MEMORY_BUDGET_BYTES),
        Err(e) => Err(anyhow::Error::from(e).context("reading FOLKSIM_MEMORY_BUDGET_MB")),
    }
}

/// Dataset name for reports: the input file stem, or "stdin".
pub fn dataset_name(path: &Path) -> String {
    if path == Path::new("-") {
        return "stdin".into();
    }
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Levenshtein distance, used for near-miss suggestions on unknown labels.
fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            curr[j + 1] = (prev[j] + cost).min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// Up to five labels close to `unknown`: small edit distance or a shared
/// prefix, closest first.
pub fn near_misses<'a>(unknown: &str, labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut scored: Vec<(usize, &str)> = labels
        .filter_map(|label| {
            let d = edit_distance(unknown, label);
            let prefix = label.starts_with(unknown) || unknown.starts_with(label);
            (d <= 2 || prefix).then_some((d, label))
        })
        .collect();
    scored.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(b.1)));
    scored
        .into_iter()
        .take(5)
        .map(|(_, l)| l.to_owned())
        .collect()
}

/// Writes bytes to a file, creating parent directories as needed.
pub fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn with_extension_appended(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
