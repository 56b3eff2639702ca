//! Sparse transaction tables.
//!
//! A table stores one year's region-by-sector flow matrix in compressed
//! sparse row form. Zeros are dropped at construction, so memory is
//! O(nonzeros + index) regardless of the dense dimension.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::index::RegionSectorIndex;
use crate::sum::CompensatedSum;

/// Square sparse matrix in CSR form with a canonical (row, column)
/// entry order, so identical cell sets produce identical iteration
/// order regardless of how they were supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrix {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Build from (row, col, value) triplets in any order.
    ///
    /// Zeros are dropped; non-finite values, out-of-bounds coordinates,
    /// and duplicate coordinates are rejected.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self, TableError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if dim > u32::MAX as usize {
            return Err(TableError::DimensionTooLarge { dim });
        }
        let mut entries: Vec<(usize, u32, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= dim || c >= dim {
                return Err(TableError::CellOutOfBounds { row: r, col: c, dim });
            }
            if !v.is_finite() {
                return Err(TableError::NonFiniteValue { row: r, col: c });
            }
            if v != 0.0 {
                entries.push((r, c as u32, v));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(TableError::DuplicateCell { row: w[0].0, col: w[0].1 as usize });
            }
        }
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(entries.len());
        let mut vals = Vec::with_capacity(entries.len());
        for &(r, c, v) in &entries {
            row_ptr[r + 1] += 1;
            cols.push(c);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { dim, row_ptr, cols, vals })
    }

    pub fn builder(dim: usize) -> SparseMatrixBuilder {
        SparseMatrixBuilder {
            dim,
            row_ptr: Vec::with_capacity(dim + 1),
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Nonzero (column, value) pairs of one row, ascending by column.
    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        self.cols[lo..hi]
            .iter()
            .zip(&self.vals[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    /// All nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.cols[lo..hi].binary_search(&(col as u32)) {
            Ok(i) => self.vals[lo + i],
            Err(_) => 0.0,
        }
    }

    /// `out = self * x`, with compensated per-row dot products.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (row, slot) in out.iter_mut().enumerate() {
            let mut acc = CompensatedSum::new();
            for (col, v) in self.row(row) {
                acc.add(v * x[col]);
            }
            *slot = acc.value();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// Per-column compensated sums.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); self.dim];
        for (_, c, v) in self.entries() {
            acc[c].add(v);
        }
        acc.into_iter().map(|a| a.value()).collect()
    }

    /// Per-row compensated sums.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|r| {
                let mut acc = CompensatedSum::new();
                for (_, v) in self.row(r) {
                    acc.add(v);
                }
                acc.value()
            })
            .collect()
    }

    /// Compensated sum of every stored value.
    pub fn total(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &v in &self.vals {
            acc.add(v);
        }
        acc.value()
    }

    /// New matrix with each column scaled by a factor; entries in
    /// columns with factor zero are dropped.
    pub fn scale_columns(&self, factors: &[f64]) -> Result<Self, TableError> {
        if factors.len() != self.dim {
            return Err(TableError::DimensionMismatch { expected: self.dim, got: factors.len() });
        }
        let mut row_ptr = Vec::with_capacity(self.dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                let f = factors[c];
                if f != 0.0 {
                    let scaled = v * f;
                    if scaled != 0.0 {
                        cols.push(c as u32);
                        vals.push(scaled);
                    }
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(Self { dim: self.dim, row_ptr, cols, vals })
    }
}

/// Streaming row-by-row construction, for parsers that see the matrix
/// one row at a time.
pub struct SparseMatrixBuilder {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseMatrixBuilder {
    /// Append the next row. Cells must arrive in ascending column order;
    /// zeros are dropped.
    pub fn push_row<I>(&mut self, cells: I) -> Result<(), TableError>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let row = self.row_ptr.len();
        if row >= self.dim {
            return Err(TableError::TooManyRows { dim: self.dim });
        }
        self.row_ptr.push(self.cols.len());
        let mut last_col: Option<u32> = None;
        for (c, v) in cells {
            if c >= self.dim {
                return Err(TableError::CellOutOfBounds { row, col: c, dim: self.dim });
            }
            if !v.is_finite() {
                return Err(TableError::NonFiniteValue { row, col: c });
            }
            let c = c as u32;
            if last_col.is_some_and(|prev| c <= prev) {
                return Err(TableError::UnorderedColumns { row });
            }
            last_col = Some(c);
            if v != 0.0 {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        Ok(())
    }

    pub fn rows_pushed(&self) -> usize {
        self.row_ptr.len()
    }

    pub fn finish(mut self) -> Result<SparseMatrix, TableError> {
        if self.row_ptr.len() != self.dim {
            return Err(TableError::MissingRows { expected: self.dim, got: self.row_ptr.len() });
        }
        self.row_ptr.push(self.cols.len());
        Ok(SparseMatrix {
            dim: self.dim,
            row_ptr: self.row_ptr,
            cols: self.cols,
            vals: self.vals,
        })
    }
}

/// Provenance and content diagnostics carried with a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMeta {
    /// Where the table came from (file path or synthetic description).
    pub source: String,
    /// Unit of the stored values (e.g. `M€`).
    pub unit: String,
    /// Count of negative cells found in the source. Negatives are kept
    /// and summed as-is; clamping them would bias aggregate flows.
    pub negative_cells: usize,
}

/// One year's region-by-sector transaction matrix.
///
/// Rows and columns share the same index. Immutable after construction,
/// so tables can be shared freely across worker threads.
#[derive(Debug, Clone)]
pub struct TransactionTable {
    year: i32,
    index: RegionSectorIndex,
    cells: SparseMatrix,
    meta: TableMeta,
}

impl TransactionTable {
    pub fn new(
        year: i32,
        index: RegionSectorIndex,
        cells: SparseMatrix,
        source: impl Into<String>,
        unit: impl Into<String>,
    ) -> Result<Self, TableError> {
        if cells.dim() != index.len() {
            return Err(TableError::DimensionMismatch {
                expected: index.len(),
                got: cells.dim(),
            });
        }
        let negative_cells = cells.vals.iter().filter(|&&v| v < 0.0).count();
        Ok(Self {
            year,
            index,
            cells,
            meta: TableMeta {
                source: source.into(),
                unit: unit.into(),
                negative_cells,
            },
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn index(&self) -> &RegionSectorIndex {
        &self.index
    }

    pub fn cells(&self) -> &SparseMatrix {
        &self.cells
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableError {
    DimensionMismatch { expected: usize, got: usize },
    DimensionTooLarge { dim: usize },
    CellOutOfBounds { row: usize, col: usize, dim: usize },
    NonFiniteValue { row: usize, col: usize },
    DuplicateCell { row: usize, col: usize },
    UnorderedColumns { row: usize },
    TooManyRows { dim: usize },
    MissingRows { expected: usize, got: usize },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Self::DimensionTooLarge { dim } => write!(f, "dimension {dim} too large"),
            Self::CellOutOfBounds { row, col, dim } => {
                write!(f, "cell ({row}, {col}) out of bounds for dimension {dim}")
            }
            Self::NonFiniteValue { row, col } => {
                write!(f, "non-finite value at ({row}, {col})")
            }
            Self::DuplicateCell { row, col } => write!(f, "duplicate cell ({row}, {col})"),
            Self::UnorderedColumns { row } => {
                write!(f, "columns of row {row} not in ascending order")
            }
            Self::TooManyRows { dim } => write!(f, "more rows pushed than dimension {dim}"),
            Self::MissingRows { expected, got } => {
                write!(f, "expected {expected} rows, got {got}")
            }
        }
    }
}

impl core::error::Error for TableError {}
