//! Similarity matrix export: labelled CSV and a compact binary snapshot.

use std::io::{Read, Write};

use super::{SimilarityError, SimilarityMatrix};

/// Writes the matrix as CSV with the labels as header row and first column.
/// Values are printed with 9 decimal places.
pub fn write_matrix_csv<W: Write>(
    matrix: &SimilarityMatrix,
    labels: &[String],
    writer: W,
) -> Result<(), SimilarityError> {
    if labels.len() != matrix.dim() {
        return Err(SimilarityError::LabelCountMismatch {
            expected: matrix.dim(),
            found: labels.len(),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = Vec::with_capacity(labels.len() + 1);
    header.push("");
    header.extend(labels.iter().map(String::as_str));
    w.write_record(&header)?;
    for (a, label) in labels.iter().enumerate() {
        let mut record = Vec::with_capacity(labels.len() + 1);
        record.push(label.clone());
        record.extend(matrix.row(a).iter().map(|v| format!("{v:.9}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Binary snapshot: dimension as little-endian u64, then the row-major lower
/// triangle (diagonal included) as little-endian f64. Symmetry makes the
/// upper triangle redundant, and liveness is recoverable from the diagonal.
pub fn write_snapshot<W: Write>(
    matrix: &SimilarityMatrix,
    mut writer: W,
) -> Result<(), SimilarityError> {
    let dim = matrix.dim();
    writer.write_all(&(dim as u64).to_le_bytes())?;
    for a in 0..dim {
        for b in 0..=a {
            writer.write_all(&matrix.get(a, b).to_le_bytes())?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads a snapshot produced by [`write_snapshot`].
pub fn read_snapshot<R: Read>(mut reader: R) -> Result<SimilarityMatrix, SimilarityError> {
    let mut header = [0u8; 8];
    reader.read_exact(&mut header)?;
    let dim = u64::from_le_bytes(header);
    let dim: usize = dim
        .try_into()
        .map_err(|_| SimilarityError::CorruptSnapshot(format!("dimension {dim} too large")))?;
    let triangle = dim
        .checked_mul(dim + 1)
        .and_then(|x| x.checked_mul(4)) // (dim*(dim+1)/2) * 8 bytes
        .ok_or_else(|| SimilarityError::CorruptSnapshot(format!("dimension {dim} too large")))?;

    let mut payload = Vec::new();
    reader.read_to_end(&mut payload)?;
    if payload.len() != triangle {
        return Err(SimilarityError::CorruptSnapshot(format!(
            "expected {} payload bytes for dimension {}, found {}",
            triangle,
            dim,
            payload.len()
        )));
    }

    let mut values = vec![0.0f64; dim * dim];
    let mut offset = 0;
    for a in 0..dim {
        for b in 0..=a {
            let bytes: [u8; 8] = payload[offset..offset + 8].try_into().unwrap();
            let v = f64::from_le_bytes(bytes);
            values[a * dim + b] = v;
            values[b * dim + a] = v;
            offset += 8;
        }
    }
    let live = (0..dim).map(|a| values[a * dim + a] > 0.0).collect();
    Ok(SimilarityMatrix::from_parts(dim, values, live))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SimilarityMatrix {
        let values = vec![1.0, 0.5, 0.0, 0.5, 1.0, 0.25, 0.0, 0.25, 1.0];
        SimilarityMatrix::from_parts(3, values, vec![true; 3])
    }

    #[test]
    fn csv_layout() {
        let labels = vec!["rust".into(), "systems".into(), "web".into()];
        let mut out = Vec::new();
        write_matrix_csv(&sample(), &labels, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(",rust,systems,web"));
        assert_eq!(
            lines.next(),
            Some("rust,1.000000000,0.500000000,0.000000000")
        );
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let labels = vec!["a,b".into(), "plain".into()];
        let m = SimilarityMatrix::from_parts(2, vec![1.0, 0.0, 0.0, 1.0], vec![true; 2]);
        let mut out = Vec::new();
        write_matrix_csv(&m, &labels, &mut out).unwrap();
        assert!(String::from_utf8(out)
            .unwrap()
            .starts_with(",\"a,b\",plain"));
    }

    #[test]
    fn label_count_must_match() {
        let labels = vec!["one".into()];
        let mut out = Vec::new();
        let err = write_matrix_csv(&sample(), &labels, &mut out).unwrap_err();
        assert!(matches!(
            err,
            SimilarityError::LabelCountMismatch {
                expected: 3,
                found: 1
            }
        ));
    }

    #[test]
    fn snapshot_round_trips_bit_exactly() {
        let m = sample();
        let mut buf = Vec::new();
        write_snapshot(&m, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 6 * 8);
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn snapshot_recovers_dead_ids() {
        let values = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let m = SimilarityMatrix::from_parts(3, values, vec![true, false, true]);
        let mut buf = Vec::new();
        write_snapshot(&m, &mut buf).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.dead_ids(), vec![1]);
    }

    #[test]
    fn truncated_snapshot_is_rejected() {
        let mut buf = Vec::new();
        write_snapshot(&sample(), &mut buf).unwrap();
        buf.pop();
        assert!(matches!(
            read_snapshot(buf.as_slice()).unwrap_err(),
            SimilarityError::CorruptSnapshot(_)
        ));
    }
}
