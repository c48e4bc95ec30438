//! Sparse-row banded LU with partial pivoting and a banded Cholesky.
//!
//! The basis system is block banded once the unknowns are ordered interval
//! by interval, so each row only ever touches a short contiguous run of
//! columns. Rows keep an explicit start column and grow on the right when
//! pivoting introduces fill.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use super::dense::estimate_inverse_norm1;

#[derive(Debug, Clone, Default)]
struct SparseRow {
    start: usize,
    values: Vec<f64>,
}

impl SparseRow {
    fn end(&self) -> usize {
        self.start + self.values.len()
    }

    fn get(&self, col: usize) -> f64 {
        if col < self.start || col >= self.end() {
            0.0
        } else {
            self.values[col - self.start]
        }
    }

    fn add(&mut self, col: usize, value: f64) {
        if self.values.is_empty() {
            self.start = col;
            self.values.push(value);
            return;
        }
        if col < self.start {
            let shift = self.start - col;
            let mut grown = vec![0.0; shift];
            grown.extend_from_slice(&self.values);
            self.values = grown;
            self.start = col;
        } else if col >= self.end() {
            self.values.resize(col - self.start + 1, 0.0);
        }
        self.values[col - self.start] += value;
    }

    fn dot(&self, x: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(&x[self.start..self.end()])
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// Square sparse matrix assembled row by row.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    rows: Vec<SparseRow>,
}

impl BandMatrix {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![SparseRow::default(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Accumulates `value` into entry `(row, col)`.
    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.n && col < self.n, "entry out of range");
        self.rows[row].add(col, value);
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row].get(col)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|r| r.dot(x)).collect()
    }

    /// Per-row sum of `|a_ij x_j|`, the natural scale of each residual.
    pub fn abs_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                r.values
                    .iter()
                    .zip(&x[r.start..r.end()])
                    .map(|(a, b)| (a * b).abs())
                    .sum()
            })
            .collect()
    }

    /// Largest `row - first nonzero column` over all rows.
    pub fn lower_bandwidth(&self) -> usize {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.values.is_empty())
            .map(|(i, r)| i.saturating_sub(r.start))
            .max()
            .unwrap_or(0)
    }
}

/// Equilibrated banded LU, `T R A C = U` with `T` a product of row
/// interchanges and Gauss transforms.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    u: Vec<SparseRow>,
    pivots: Vec<usize>,
    multipliers: Vec<Vec<(usize, f64)>>,
    norm1: f64,
    singular: bool,
}

impl BandLu {
    pub fn new(a: &BandMatrix) -> Self {
        let n = a.n;
        let kl = a.lower_bandwidth();
        let mut rows = a.rows.clone();

        let row_scale: Vec<f64> = rows
            .iter()
            .map(|r| {
                let m = r.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            })
            .collect();
        for (r, s) in rows.iter_mut().zip(&row_scale) {
            r.values.iter_mut().for_each(|v| *v *= s);
        }
        let mut col_max = vec![0.0f64; n];
        for r in &rows {
            for (j, v) in r.values.iter().enumerate() {
                let c = r.start + j;
                col_max[c] = col_max[c].max(v.abs());
            }
        }
        let col_scale: Vec<f64> = col_max
            .iter()
            .map(|&m| if m > 0.0 { 1.0 / m } else { 1.0 })
            .collect();
        for r in rows.iter_mut() {
            let start = r.start;
            for (j, v) in r.values.iter_mut().enumerate() {
                *v *= col_scale[start + j];
            }
        }
        let mut col_sums = vec![0.0f64; n];
        for r in &rows {
            for (j, v) in r.values.iter().enumerate() {
                col_sums[r.start + j] += v.abs();
            }
        }
        let norm1 = col_sums.iter().fold(0.0f64, |m, v| m.max(*v));

        let mut pivots = vec![0usize; n];
        let mut multipliers = vec![Vec::new(); n];
        let mut singular = false;
        for c in 0..n {
            let last = (c + kl + 1).min(n);
            let mut p = c;
            let mut best = 0.0;
            for (r, row) in rows.iter().enumerate().take(last).skip(c) {
                let v = row.get(c).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            pivots[c] = p;
            if best == 0.0 {
                singular = true;
                continue;
            }
            rows.swap(c, p);
            let pivot_row = core::mem::take(&mut rows[c]);
            let pivot = pivot_row.get(c);
            for r in c + 1..last {
                let v = rows[r].get(c);
                if v == 0.0 {
                    continue;
                }
                let f = v / pivot;
                multipliers[c].push((r, f));
                for col in c..pivot_row.end() {
                    let u = pivot_row.get(col);
                    if u != 0.0 {
                        rows[r].add(col, -f * u);
                    }
                }
                // exact zero below the pivot
                let start = rows[r].start;
                if c >= start && c < rows[r].end() {
                    rows[r].values[c - start] = 0.0;
                }
            }
            rows[c] = pivot_row;
        }
        // trim leading zeros so every U row starts on its diagonal
        for (c, r) in rows.iter_mut().enumerate() {
            if r.values.is_empty() {
                r.start = c;
                r.values.push(0.0);
            } else if r.start > c {
                let mut grown = vec![0.0; r.start - c];
                grown.extend_from_slice(&r.values);
                r.values = grown;
                r.start = c;
            } else if r.start < c {
                let cut = c - r.start;
                r.values.drain(..cut.min(r.values.len()));
                r.start = c;
                if r.values.is_empty() {
                    r.values.push(0.0);
                }
            }
        }
        Self {
            n,
            row_scale,
            col_scale,
            u: rows,
            pivots,
            multipliers,
            norm1,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Column whose pivot is smallest in magnitude (equilibrated scale).
    pub fn weakest_pivot(&self) -> usize {
        let mut best = 0;
        let mut small = f64::INFINITY;
        for (c, row) in self.u.iter().enumerate() {
            let v = row.values.first().map_or(0.0, |v| v.abs());
            if v < small {
                small = v;
                best = c;
            }
        }
        best
    }

    fn solve_scaled(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for c in 0..self.n {
            y.swap(c, self.pivots[c]);
            let yc = y[c];
            for &(r, f) in &self.multipliers[c] {
                y[r] -= f * yc;
            }
        }
        for c in (0..self.n).rev() {
            let row = &self.u[c];
            let mut s = y[c];
            for (j, v) in row.values.iter().enumerate().skip(1) {
                s -= v * y[c + j];
            }
            y[c] = s / row.values[0];
        }
        y
    }

    fn solve_scaled_transpose(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for c in 0..self.n {
            let row = &self.u[c];
            y[c] /= row.values[0];
            let yc = y[c];
            for (j, v) in row.values.iter().enumerate().skip(1) {
                y[c + j] -= v * yc;
            }
        }
        for c in (0..self.n).rev() {
            let mut s = 0.0;
            for &(r, f) in &self.multipliers[c] {
                s += f * y[r];
            }
            y[c] -= s;
            y.swap(c, self.pivots[c]);
        }
        y
    }

    /// Solves `A x = b` for the original (unscaled) matrix.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rb: Vec<f64> = b.iter().zip(&self.row_scale).map(|(v, s)| v * s).collect();
        let y = self.solve_scaled(&rb);
        y.iter().zip(&self.col_scale).map(|(v, s)| v * s).collect()
    }

    /// Reciprocal 1-norm condition estimate of the equilibrated matrix.
    pub fn rcond(&self) -> f64 {
        if self.singular || self.norm1 == 0.0 {
            return 0.0;
        }
        let inv = estimate_inverse_norm1(
            self.n,
            |b| self.solve_scaled(b),
            |b| self.solve_scaled_transpose(b),
        );
        if !inv.is_finite() || inv == 0.0 {
            0.0
        } else {
            1.0 / (self.norm1 * inv)
        }
    }
}

/// Cholesky factor of a symmetric positive definite band matrix with
/// half-bandwidth `w` (entries vanish for `|i - j| > w`).
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    w: usize,
    // l[i][k] = L(i, i - w + k)
    l: Vec<Vec<f64>>,
}

impl BandCholesky {
    /// `lower(i, j)` supplies entry `(i, j)` for `j <= i`. Returns `None`
    /// when the matrix is not numerically positive definite.
    pub fn new(n: usize, w: usize, lower: impl Fn(usize, usize) -> f64) -> Option<Self> {
        let mut l = vec![vec![0.0; w + 1]; n];
        for i in 0..n {
            let j0 = i.saturating_sub(w);
            for j in j0..=i {
                let mut s = lower(i, j);
                let k0 = j0.max(j.saturating_sub(w));
                for k in k0..j {
                    s -= l[i][k + w - i] * l[j][k + w - j];
                }
                if j == i {
                    if !(s > 0.0) {
                        return None;
                    }
                    l[i][w] = s.sqrt();
                } else {
                    l[i][j + w - i] = s / l[j][w];
                }
            }
        }
        Some(Self { n, w, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, w) = (self.n, self.w);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(w)..i {
                s -= self.l[i][k + w - i] * y[k];
            }
            y[i] = s / self.l[i][w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + w + 1).min(n) {
                s -= self.l[k][i + w - k] * y[k];
            }
            y[i] = s / self.l[i][w];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{Lu, Matrix};

    fn sample() -> (BandMatrix, Matrix) {
        // pentadiagonal with a weak diagonal to force pivoting
        let n = 9;
        let mut b = BandMatrix::new(n);
        let mut d = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i.saturating_sub(2)..(i + 3).min(n) {
                let v = if i == j {
                    1e-3 * (i as f64 + 1.0)
                } else {
                    (i * 7 + j * 3) as f64 % 5.0 - 2.0 + 0.5
                };
                b.add(i, j, v);
                d[(i, j)] = v;
            }
        }
        (b, d)
    }

    #[test]
    fn band_lu_matches_dense() {
        let (b, d) = sample();
        let rhs: Vec<f64> = (0..9).map(|i| i as f64 - 3.0).collect();
        let xb = BandLu::new(&b).solve(&rhs);
        let xd = Lu::new(&d).solve(&rhs);
        for (u, v) in xb.iter().zip(&xd) {
            assert!((u - v).abs() < 1e-10 * (1.0 + v.abs()));
        }
        let back = b.mul_vec(&xb);
        for (u, v) in back.iter().zip(&rhs) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn band_transpose_solve_is_consistent() {
        let (b, _) = sample();
        let lu = BandLu::new(&b);
        let rhs: Vec<f64> = (0..9).map(|i| (i as f64).sin()).collect();
        let y = lu.solve_scaled_transpose(&rhs);
        let z = lu.solve_scaled(&rhs);
        // <A^{-T} r, r> == <r, A^{-1} r>
        let lhs: f64 = y.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        let rhs_dot: f64 = z.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs_dot).abs() < 1e-9 * lhs.abs().max(1.0));
        assert!(lu.rcond() > 0.0);
    }

    #[test]
    fn singular_band_detected() {
        let mut b = BandMatrix::new(3);
        b.add(0, 0, 1.0);
        b.add(1, 0, 1.0);
        b.add(2, 2, 1.0);
        let lu = BandLu::new(&b);
        assert!(lu.is_singular());
        assert_eq!(lu.rcond(), 0.0);
    }

    #[test]
    fn band_cholesky_solves_tridiagonal() {
        let n = 6;
        let lower = |i: usize, j: usize| if i == j { 4.0 } else { 1.0 };
        let ch = BandCholesky::new(n, 1, |i, j| if i - j <= 1 { lower(i, j) } else { 0.0 })
            .expect("spd");
        let x = ch.solve(&[5.0, 6.0, 6.0, 6.0, 6.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(BandCholesky::new(2, 1, |i, j| if i == j { 1.0 } else { 2.0 }).is_none());
    }
}
