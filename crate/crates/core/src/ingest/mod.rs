//! Triple-file ingestion and synthetic dataset generation.
//!
//! The interchange format is UTF-8 text, one tag assignment per line:
//! user, resource and tag labels separated by a configurable delimiter
//! (tab by default). Blank lines and lines starting with '#' are skipped.

mod generate;

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::model::{FolksonomyDataset, Triple};

pub use generate::{generate, GeneratorConfig};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {line}: expected 3 fields separated by {delimiter:?}, found {found}")]
    WrongFieldCount {
        line: u64,
        delimiter: char,
        found: usize,
    },
    #[error("line {line}: empty {field} field")]
    EmptyField { line: u64, field: &'static str },
    #[error("label {label:?} cannot be serialized (contains the delimiter, a newline, or leads with '#')")]
    UnserializableLabel { label: String },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parsing knobs for the triple format.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub delimiter: char,
    /// Count and skip malformed lines instead of failing on the first one.
    pub skip_malformed: bool,
    /// Lowercase tag labels; user and resource labels stay byte-exact.
    pub case_fold_tags: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: '\t',
            skip_malformed: false,
            case_fold_tags: false,
        }
    }
}

/// Counters accumulated while parsing.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub triples: u64,
    pub skipped: u64,
}

/// Streaming triple parser; yields trimmed triples in input order.
pub struct TripleReader<R> {
    lines: std::io::Lines<R>,
    options: ParseOptions,
    line: u64,
    stats: ParseStats,
}

/// Parses a triple stream. Line numbers in errors are 1-based and count
/// every physical line, comments and blanks included.
pub fn parse_triples<R: BufRead>(reader: R, options: ParseOptions) -> TripleReader<R> {
    TripleReader {
        lines: reader.lines(),
        options,
        line: 0,
        stats: ParseStats::default(),
    }
}

impl<R: BufRead> TripleReader<R> {
    pub fn stats(&self) -> ParseStats {
        self.stats
    }

    fn parse_line(&self, line: &str) -> Result<Triple, IngestError> {
        let fields: Vec<&str> = line.split(self.options.delimiter).collect();
        if fields.len() != 3 {
            return Err(IngestError::WrongFieldCount {
                line: self.line,
                delimiter: self.options.delimiter,
                found: fields.len(),
            });
        }
        let names = ["user", "resource", "tag"];
        let mut trimmed = [""; 3];
        for (i, field) in fields.iter().enumerate() {
            let t = field.trim();
            if t.is_empty() {
                return Err(IngestError::EmptyField {
                    line: self.line,
                    field: names[i],
                });
            }
            trimmed[i] = t;
        }
        let tag = if self.options.case_fold_tags {
            trimmed[2].to_lowercase()
        } else {
            trimmed[2].to_owned()
        };
        Ok(Triple::new(trimmed[0], trimmed[1], tag))
    }
}

impl<R: BufRead> Iterator for TripleReader<R> {
    type Item = Result<Triple, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line += 1;
            let trimmed = line.trim_start();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match self.parse_line(&line) {
                Ok(triple) => {
                    self.stats.triples += 1;
                    return Some(Ok(triple));
                }
                Err(e) if self.options.skip_malformed => {
                    self.stats.skipped += 1;
                    let _ = e;
                }
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// Collects a whole stream, honoring the skip-on-error mode.
pub fn read_triples<R: BufRead>(
    reader: R,
    options: ParseOptions,
) -> Result<(Vec<Triple>, ParseStats), IngestError> {
    let mut parser = parse_triples(reader, options);
    let mut triples = Vec::new();
    for item in &mut parser {
        triples.push(item?);
    }
    Ok((triples, parser.stats()))
}

/// Serializes a dataset in the triple format, one assignment per line, tags
/// in id order within each bookmark. Returns the number of lines written.
///
/// Labels that would corrupt the format (embedded delimiter or newline, or a
/// user label leading with '#') are rejected.
pub fn write_triples<W: Write>(
    dataset: &FolksonomyDataset,
    delimiter: char,
    mut writer: W,
) -> Result<u64, IngestError> {
    let check = |label: &str, line_start: bool| -> Result<(), IngestError> {
        if label.contains(delimiter)
            || label.contains('\n')
            || label.contains('\r')
            || (line_start && label.starts_with('#'))
        {
            return Err(IngestError::UnserializableLabel {
                label: label.to_owned(),
            });
        }
        Ok(())
    };
    let mut lines = 0u64;
    for b in dataset.bookmarks() {
        let user = dataset.users().label(b.user.0).expect("valid dataset");
        let resource = dataset
            .resources()
            .label(b.resource.0)
            .expect("valid dataset");
        check(user, true)?;
        check(resource, false)?;
        for &t in b.tags() {
            let tag = dataset.tags().label(t.0).expect("valid dataset");
            check(tag, false)?;
            writeln!(writer, "{user}{delimiter}{resource}{delimiter}{tag}")?;
            lines += 1;
        }
    }
    writer.flush()?;
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_dataset;

    fn parse_all(input: &str, options: ParseOptions) -> (Vec<Triple>, ParseStats) {
        read_triples(input.as_bytes(), options).unwrap()
    }

    #[test]
    fn single_line() {
        let (triples, stats) = parse_all("u1\tr1\tt1\n", ParseOptions::default());
        assert_eq!(triples, vec![Triple::new("u1", "r1", "t1")]);
        assert_eq!(stats.triples, 1);
        assert_eq!(stats.skipped, 0);
    }

    #[test]
    fn comments_and_blanks_are_skipped() {
        let (triples, _) = parse_all("# comment\n\n", ParseOptions::default());
        assert!(triples.is_empty());
    }

    #[test]
    fn fields_are_trimmed() {
        let (triples, _) = parse_all(" u1 \t r1\tt1 \n", ParseOptions::default());
        assert_eq!(triples, vec![Triple::new("u1", "r1", "t1")]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let input = "u1\tr1\tt1\n# note\nu2\tr2\n";
        let err = read_triples(input.as_bytes(), ParseOptions::default()).unwrap_err();
        match err {
            IngestError::WrongFieldCount { line, found, .. } => {
                assert_eq!(line, 3);
                assert_eq!(found, 2);
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn empty_field_reports_line_number() {
        let err = read_triples("u1\t\tt1\n".as_bytes(), ParseOptions::default()).unwrap_err();
        match err {
            IngestError::EmptyField { line, field } => {
                assert_eq!(line, 1);
                assert_eq!(field, "resource");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn skip_mode_counts_malformed_lines() {
        let mut input = String::new();
        for i in 0..100 {
            if i == 57 {
                input.push_str("broken line\n");
            } else {
                input.push_str(&format!("u{i}\tr{i}\tt{i}\n"));
            }
        }
        let options = ParseOptions {
            skip_malformed: true,
            ..ParseOptions::default()
        };
        let (triples, stats) = parse_all(&input, options);
        assert_eq!(triples.len(), 99);
        assert_eq!(stats.skipped, 1);
        assert_eq!(stats.triples, 99);
    }

    #[test]
    fn custom_delimiter() {
        let options = ParseOptions {
            delimiter: ',',
            ..ParseOptions::default()
        };
        let (triples, _) = parse_all("u1,r1,t1\n", options);
        assert_eq!(triples, vec![Triple::new("u1", "r1", "t1")]);
    }

    #[test]
    fn case_folding_applies_to_tags_only() {
        let options = ParseOptions {
            case_fold_tags: true,
            ..ParseOptions::default()
        };
        let (triples, _) = parse_all("U1\tR1\tRust\n", options);
        assert_eq!(triples, vec![Triple::new("U1", "R1", "rust")]);
    }

    #[test]
    fn write_then_parse_round_trips() {
        let dataset = build_dataset([
            Triple::new("u1", "r1", "t2"),
            Triple::new("u1", "r1", "t1"),
            Triple::new("u2", "r1", "t1"),
        ])
        .unwrap();
        let mut buf = Vec::new();
        let lines = write_triples(&dataset, '\t', &mut buf).unwrap();
        assert_eq!(lines, 3);
        let (triples, _) = read_triples(buf.as_slice(), ParseOptions::default()).unwrap();
        let reparsed = build_dataset(triples).unwrap();
        assert_eq!(reparsed, dataset);
    }

    #[test]
    fn labels_with_delimiter_are_rejected() {
        let dataset = build_dataset([Triple::new("u\t1", "r1", "t1")]).unwrap();
        let err = write_triples(&dataset, '\t', Vec::new()).unwrap_err();
        assert!(matches!(err, IngestError::UnserializableLabel { .. }));
    }
}
