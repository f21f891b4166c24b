//! Tabular rendering of evaluation reports.

use std::io::Write;

use super::{EvalError, EvalReport};

/// Writes the report as a compact CSV table: one row per propagation factor
/// with the averaged precision and recall at 9 decimal places. The psi = 0
/// row is the cosine baseline and is labelled as such.
pub fn write_report_csv<W: Write>(report: &EvalReport, writer: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["psi", "dataset", "precision", "recall", "metric"])?;
    for result in &report.results {
        let fmt = |v: Option<f64>| match v {
            Some(v) => format!("{v:.9}"),
            None => String::new(),
        };
        let metric = if result.psi == 0.0 {
            "cosine (baseline)"
        } else {
            "iterative"
        };
        w.write_record([
            format!("{}", result.psi),
            report.dataset_name.clone(),
            fmt(result.mean_precision),
            fmt(result.mean_recall),
            metric.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{PsiResult, SplitConfig};

    fn sample_report() -> EvalReport {
        EvalReport {
            dataset_name: "synth".into(),
            config: SplitConfig::new(42),
            empty_repetitions: 0,
            results: vec![
                PsiResult {
                    psi: 0.0,
                    tolerance: 1e-4,
                    max_iterations: 50,
                    mean_precision: Some(0.1),
                    mean_recall: Some(0.1),
                    per_repetition: vec![],
                },
                PsiResult {
                    psi: 0.3,
                    tolerance: 1e-4,
                    max_iterations: 50,
                    mean_precision: Some(0.25),
                    mean_recall: Some(0.2),
                    per_repetition: vec![],
                },
            ],
        }
    }

    #[test]
    fn csv_rows_per_psi() {
        let mut out = Vec::new();
        write_report_csv(&sample_report(), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "psi,dataset,precision,recall,metric");
        assert_eq!(
            lines[1],
            "0,synth,0.100000000,0.100000000,cosine (baseline)"
        );
        assert_eq!(lines[2], "0.3,synth,0.250000000,0.200000000,iterative");
    }

    #[test]
    fn missing_means_render_empty() {
        let mut report = sample_report();
        report.results[1].mean_precision = None;
        report.results[1].mean_recall = None;
        let mut out = Vec::new();
        write_report_csv(&report, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().nth(2).unwrap().starts_with("0.3,synth,,,"));
    }
}
