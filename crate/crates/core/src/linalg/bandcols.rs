use alloc::vec;
use alloc::vec::Vec;

/// One column of a column-banded matrix: `values[i]` sits at row `start + i`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BandColumn {
    pub start: usize,
    pub values: Vec<f64>,
}

impl BandColumn {
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    pub fn get(&self, row: usize) -> f64 {
        if row < self.start || row >= self.end() {
            0.0
        } else {
            self.values[row - self.start]
        }
    }

    /// Sets an entry, growing the stored range when needed.
    pub fn set(&mut self, row: usize, value: f64) {
        if self.values.is_empty() {
            if value == 0.0 {
                return;
            }
            self.start = row;
            self.values.push(value);
            return;
        }
        if row < self.start {
            if value == 0.0 {
                return;
            }
            let mut grown = vec![0.0; self.start - row];
            grown.extend_from_slice(&self.values);
            self.values = grown;
            self.start = row;
        } else if row >= self.end() {
            if value == 0.0 {
                return;
            }
            self.values.resize(row - self.start + 1, 0.0);
        }
        self.values[row - self.start] = value;
    }

    /// Drops exact zeros at either end.
    pub fn trim(&mut self) {
        while let Some(&0.0) = self.values.last() {
            self.values.pop();
        }
        let lead = self.values.iter().take_while(|v| **v == 0.0).count();
        if lead > 0 {
            self.values.drain(..lead);
            self.start += lead;
        }
        if self.values.is_empty() {
            self.start = 0;
        }
    }

    /// Inclusive row range of the stored entries, `None` when empty.
    pub fn range(&self) -> Option<(usize, usize)> {
        if self.values.is_empty() {
            None
        } else {
            Some((self.start, self.end() - 1))
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }
}

/// Sparse matrix stored as contiguous bands per column. Refinement and
/// detail matrices have a handful of nonzeros per column, clustered around
/// twice the column index.
#[derive(Debug, Clone, PartialEq)]
pub struct BandColumns {
    rows: usize,
    columns: Vec<BandColumn>,
}

impl BandColumns {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: vec![BandColumn::default(); cols],
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<BandColumn>) -> Self {
        for c in &columns {
            assert!(c.end() <= rows || c.values.is_empty(), "column exceeds row count");
        }
        Self { rows, columns }
    }

    pub fn identity(n: usize) -> Self {
        let columns = (0..n)
            .map(|k| BandColumn {
                start: k,
                values: vec![1.0],
            })
            .collect();
        Self { rows: n, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.columns[col].get(row)
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.rows, "row out of range");
        self.columns[col].set(row, value);
    }

    pub fn column(&self, col: usize) -> &BandColumn {
        &self.columns[col]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut BandColumn {
        &mut self.columns[col]
    }

    pub fn columns(&self) -> &[BandColumn] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(BandColumn::nnz).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols());
        let mut out = vec![0.0; self.rows];
        for (c, xc) in self.columns.iter().zip(x) {
            for (i, v) in c.values.iter().enumerate() {
                out[c.start + i] += v * xc;
            }
        }
        out
    }

    pub fn transpose_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        self.columns
            .iter()
            .map(|c| {
                c.values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * y[c.start + i])
                    .sum()
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for c in &self.columns {
            for (i, v) in c.values.iter().enumerate() {
                out[c.start + i] += v;
            }
        }
        out
    }

    /// Submatrix of rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> BandColumns {
        let columns = self.columns[c0..c1]
            .iter()
            .map(|c| {
                let mut col = BandColumn::default();
                for r in r0.max(c.start)..r1.min(c.end()) {
                    col.set(r - r0, c.get(r));
                }
                col.trim();
                col
            })
            .collect();
        BandColumns {
            rows: r1 - r0,
            columns,
        }
    }

    pub fn to_dense(&self) -> super::Matrix {
        let mut m = super::Matrix::zeros(self.rows, self.cols());
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c.values.iter().enumerate() {
                m[(c.start + i, j)] = *v;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &BandColumns) -> f64 {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols(), other.cols());
        let mut worst = 0.0f64;
        for (a, b) in self.columns.iter().zip(&other.columns) {
            let lo = a.start.min(b.start);
            let hi = a.end().max(b.end());
            for r in lo..hi {
                worst = worst.max((a.get(r) - b.get(r)).abs());
            }
        }
        worst
    }
}
