//! Compressed sparse occurrence-count matrix with both row-major and
//! column-major access paths.

use std::collections::HashMap;

/// Sparse non-negative count matrix. Zero entries are absent by
/// construction; every stored count is > 0. Both CSR and CSC index arrays
/// are kept so rows and columns iterate at the same cost, which also makes
/// the transpose a constant-time swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseCountMatrix {
    rows: usize,
    cols: usize,
    // CSR
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    row_val: Vec<u32>,
    // CSC
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    col_val: Vec<u32>,
}

impl SparseCountMatrix {
    /// Builds from a (row, col) -> count map. Zero counts are dropped;
    /// indices must lie within the given shape.
    pub fn from_counts(rows: usize, cols: usize, counts: HashMap<(u32, u32), u32>) -> Self {
        let triplets = counts.into_iter().map(|((r, c), v)| (r, c, v));
        Self::from_triplets(rows, cols, triplets)
    }

    /// Builds from (row, col, count) triplets, summing duplicates.
    ///
    /// Panics if an index is out of bounds; counts of zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (u32, u32, u32)>,
    ) -> Self {
        let mut entries: Vec<(u32, u32, u32)> = triplets.into_iter().collect();
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        // sum duplicates in place
        let mut merged: Vec<(u32, u32, u32)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            assert!(
                (r as usize) < rows && (c as usize) < cols,
                "index out of bounds"
            );
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v > 0);

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &merged {
            row_ptr[r as usize + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx: Vec<u32> = merged.iter().map(|&(_, c, _)| c).collect();
        let row_val: Vec<u32> = merged.iter().map(|&(_, _, v)| v).collect();

        let mut by_col = merged;
        by_col.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, c, _) in &by_col {
            col_ptr[c as usize + 1] += 1;
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let row_idx: Vec<u32> = by_col.iter().map(|&(r, _, _)| r).collect();
        let col_val: Vec<u32> = by_col.iter().map(|&(_, _, v)| v).collect();

        SparseCountMatrix {
            rows,
            cols,
            row_ptr,
            col_idx,
            row_val,
            col_ptr,
            row_idx,
            col_val,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of stored (non-zero) entries.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    /// Count at (row, col); 0 when the entry is not stored.
    pub fn get(&self, row: usize, col: usize) -> u32 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        let span = &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]];
        match span.binary_search(&(col as u32)) {
            Ok(k) => self.row_val[self.row_ptr[row] + k],
            Err(_) => 0,
        }
    }

    /// Stored entries of one row as (col, count), in ascending column order.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (u32, u32)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.row_val[span].iter().copied())
    }

    /// Stored entries of one column as (row, count), in ascending row order.
    pub fn col(&self, col: usize) -> impl Iterator<Item = (u32, u32)> + '_ {
        let span = self.col_ptr[col]..self.col_ptr[col + 1];
        self.row_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.col_val[span].iter().copied())
    }

    pub fn row_nnz(&self, row: usize) -> usize {
        self.row_ptr[row + 1] - self.row_ptr[row]
    }

    /// Sum of all stored counts.
    pub fn total(&self) -> u64 {
        self.row_val.iter().map(|&v| v as u64).sum()
    }

    pub fn row_sum(&self, row: usize) -> u64 {
        self.row(row).map(|(_, v)| v as u64).sum()
    }

    pub fn col_sum(&self, col: usize) -> u64 {
        self.col(col).map(|(_, v)| v as u64).sum()
    }

    /// CSR arrays: (row pointers, column indices, counts).
    pub(crate) fn csr_parts(&self) -> (&[usize], &[u32], &[u32]) {
        (&self.row_ptr, &self.col_idx, &self.row_val)
    }

    /// CSC arrays: (column pointers, row indices, counts).
    pub(crate) fn csc_parts(&self) -> (&[usize], &[u32], &[u32]) {
        (&self.col_ptr, &self.row_idx, &self.col_val)
    }

    /// The transposed matrix. CSR and CSC sides swap, so this is cheap.
    pub fn transposed(&self) -> SparseCountMatrix {
        SparseCountMatrix {
            rows: self.cols,
            cols: self.rows,
            row_ptr: self.col_ptr.clone(),
            col_idx: self.row_idx.clone(),
            row_val: self.col_val.clone(),
            col_ptr: self.row_ptr.clone(),
            row_idx: self.col_idx.clone(),
            col_val: self.row_val.clone(),
        }
    }
}
