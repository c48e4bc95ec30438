use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Row-major dense matrix for the small systems that show up everywhere in
/// the construction (collocation blocks, moment systems, least squares).
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    norm1: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Self {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        let n = a.rows;
        let norm1 = a.norm1();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for c in 0..n {
            let mut p = c;
            let mut best = lu[(c, c)].abs();
            for r in c + 1..n {
                let v = lu[(r, c)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != c {
                for j in 0..n {
                    lu.data.swap(c * n + j, p * n + j);
                }
                perm.swap(c, p);
            }
            let pivot = lu[(c, c)];
            for r in c + 1..n {
                let f = lu[(r, c)] / pivot;
                lu[(r, c)] = f;
                if f != 0.0 {
                    for j in c + 1..n {
                        let u = lu[(c, j)];
                        lu[(r, j)] -= f * u;
                    }
                }
            }
        }
        Self {
            lu,
            perm,
            norm1,
            singular,
        }
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s -= self.lu[(j, i)] * y[j];
            }
            y[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)] * y[j];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// Reciprocal 1-norm condition estimate. Zero for singular matrices.
    pub fn rcond(&self) -> f64 {
        if self.singular || self.norm1 == 0.0 {
            return 0.0;
        }
        let inv_norm = estimate_inverse_norm1(self.dim(), |b| self.solve(b), |b| {
            self.solve_transpose(b)
        });
        if !inv_norm.is_finite() || inv_norm == 0.0 {
            return 0.0;
        }
        1.0 / (self.norm1 * inv_norm)
    }
}

/// Hager's estimator of `||A^{-1}||_1` given solvers for `A` and `A^T`.
pub(crate) fn estimate_inverse_norm1(
    n: usize,
    solve: impl Fn(&[f64]) -> Vec<f64>,
    solve_t: impl Fn(&[f64]) -> Vec<f64>,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x);
        est = y.iter().map(|v| v.abs()).sum::<f64>();
        let xi: Vec<f64> = y
            .iter()
            .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
            .collect();
        let z = solve_t(&xi);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bj, bv), (i, v)| {
                if v.abs() > bv {
                    (i, v.abs())
                } else {
                    (bj, bv)
                }
            });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx {
            break;
        }
        x.iter_mut().for_each(|v| *v = 0.0);
        x[j] = 1.0;
    }
    est
}

/// Householder least squares for tall systems `min ||A x - b||_2`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<f64>,
    /// Euclidean norm of `A x - b`.
    pub residual: f64,
    /// Ratio of smallest to largest diagonal entry of `R`.
    pub rdiag_ratio: f64,
}

pub fn least_squares(a: &Matrix, b: &[f64]) -> LeastSquares {
    let (m, n) = (a.rows, a.cols);
    assert!(m >= n, "least squares needs at least as many rows as columns");
    assert_eq!(b.len(), m);
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            qtb[i] -= f * v[i - k];
        }
    }
    let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
    for k in 0..n {
        let d = r[(k, k)].abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = qtb[k];
        for j in k + 1..n {
            s -= r[(k, j)] * x[j];
        }
        x[k] = if r[(k, k)] != 0.0 { s / r[(k, k)] } else { 0.0 };
    }
    let residual = (n..m).map(|i| qtb[i] * qtb[i]).sum::<f64>().sqrt();
    LeastSquares {
        solution: x,
        residual,
        rdiag_ratio: if n == 0 {
            1.0
        } else if dmax > 0.0 {
            dmin / dmax
        } else {
            0.0
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_inverts() {
        let a = Matrix::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let lu = Lu::new(&a);
        let x = lu.solve(&[3.0, 5.0, 5.0]);
        for (xi, ei) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((xi - ei).abs() < 1e-14);
        }
        let xt = lu.solve_transpose(&[3.0, 5.0, 5.0]);
        let back = a.transpose().mul_vec(&xt);
        for (bi, ei) in back.iter().zip([3.0, 5.0, 5.0]) {
            assert!((bi - ei).abs() < 1e-13);
        }
        let prod = a.mul(&lu.inverse());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rcond_flags_near_singular() {
        let good = Lu::new(&Matrix::identity(4));
        assert!((good.rcond() - 1.0).abs() < 1e-12);
        let bad = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0 + 1e-13]]);
        assert!(Lu::new(&bad).rcond() < 1e-10);
        let zero = Matrix::zeros(2, 2);
        assert_eq!(Lu::new(&zero).rcond(), 0.0);
    }

    #[test]
    fn rcond_matches_exact_for_diagonal() {
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 1e-3]]);
        assert!((Lu::new(&a).rcond() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn least_squares_fits_line() {
        // y = 1 + 2x sampled exactly, plus one redundant row.
        let a = Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]);
        let ls = least_squares(&a, &[1.0, 3.0, 5.0, 7.0]);
        assert!((ls.solution[0] - 1.0).abs() < 1e-13);
        assert!((ls.solution[1] - 2.0).abs() < 1e-13);
        assert!(ls.residual < 1e-13);
        let inconsistent = least_squares(&a, &[1.0, 3.0, 5.0, 8.0]);
        assert!(inconsistent.residual > 0.1);
    }
}
