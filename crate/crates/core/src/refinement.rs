//! Two-scale refinement `Phi_j = Phi_{j+1} H_j` between nested bases.
//!
//! Column `k` of `H` is confined to fine rows `max(k, 2k - m + 1) ..=
//! min(2k + 1, k + n - 1)`. Walking the columns left to right, the rows that
//! column `k` is the last to touch get their entry from the unit row sum;
//! the other entries of the column must cancel the `(m-1)`-th derivative
//! jumps at the new (odd) fine knots.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{BrokenBasis, Side};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, BandColumn, BandColumns, Matrix};
use crate::smooth::RCOND_MIN;

/// Residual allowed in the jump equations and the two-scale check.
pub const REFINEMENT_TOLERANCE: f64 = 1e-8;

/// Jumps of the `(m-1)`-th derivative of every fine basis function at the
/// odd fine knots. Row `r` belongs to knot `2r + 1`; its stored entries are
/// the functions `2r .. 2r + m` (the only ones that can jump there).
#[derive(Debug, Clone, PartialEq)]
pub struct JumpMatrix {
    cols: usize,
    rows: Vec<BandColumn>,
}

impl JumpMatrix {
    pub fn new(fine: &BrokenBasis) -> Self {
        let m = fine.order();
        let n = fine.grid().len();
        let cols = fine.len();
        let rows = (1..n - 1)
            .step_by(2)
            .map(|i| {
                let start = i - 1;
                let end = (i + m).min(cols);
                BandColumn {
                    start,
                    values: (start..end).map(|l| fine.jump(l, i)).collect(),
                }
            })
            .collect();
        Self { cols, rows }
    }

    /// Number of odd knots.
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Fine knot index of row `r`.
    pub fn knot(&self, r: usize) -> usize {
        2 * r + 1
    }

    pub fn row(&self, r: usize) -> &BandColumn {
        &self.rows[r]
    }

    /// Entry at odd knot `i` (a fine knot index) and function `l`.
    pub fn at_knot(&self, i: usize, l: usize) -> f64 {
        if i % 2 == 0 || i / 2 >= self.rows.len() {
            return 0.0;
        }
        self.rows[i / 2].get(l)
    }

    /// Largest entry of `Delta H`, relative to the largest jump in the same
    /// row.
    pub fn annihilation_residual(&self, h: &RefinementMatrix) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let scale = row.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if scale == 0.0 {
                continue;
            }
            for k in 0..h.cols() {
                let c = h.matrix.column(k);
                let mut s = 0.0;
                for l in row.start.max(c.start)..row.end().min(c.end()) {
                    s += row.get(l) * c.get(l);
                }
                worst = worst.max(s.abs() / scale);
            }
        }
        worst
    }
}

/// Refinement matrix with the boundary block sizes of its order.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementMatrix {
    order: usize,
    coarse_knots: usize,
    matrix: BandColumns,
}

/// First fine row of column `k`.
fn row_lo(k: usize, m: usize) -> usize {
    k.max((2 * k + 1).saturating_sub(m))
}

/// Last fine row of column `k` on a coarse grid with `n` knots.
fn row_hi(k: usize, n: usize) -> usize {
    (2 * k + 1).min(k + n - 1)
}

impl RefinementMatrix {
    pub fn from_parts(order: usize, coarse_knots: usize, matrix: BandColumns) -> Result<Self> {
        let cols = coarse_knots + order - 2;
        let rows = 2 * coarse_knots - 1 + order - 2;
        if matrix.cols() != cols {
            return Err(Error::Shape {
                expected: cols,
                found: matrix.cols(),
            });
        }
        if matrix.rows() != rows {
            return Err(Error::Shape {
                expected: rows,
                found: matrix.rows(),
            });
        }
        Ok(Self {
            order,
            coarse_knots,
            matrix,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Knots of the coarse grid.
    pub fn coarse_knots(&self) -> usize {
        self.coarse_knots
    }

    pub fn matrix(&self) -> &BandColumns {
        &self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix.get(row, col)
    }

    /// Boundary functions set aside on the left, `ceil(m/2) - 1`.
    pub fn left_boundary(&self) -> usize {
        self.order.div_ceil(2) - 1
    }

    /// Boundary functions set aside on the right, `floor(m/2) - 1`.
    pub fn right_boundary(&self) -> usize {
        self.order / 2 - 1
    }

    /// `max_l |sum_k H_{l,k} - 1|`.
    pub fn row_sum_deviation(&self) -> f64 {
        self.matrix
            .row_sums()
            .iter()
            .fold(0.0, |a, s| a.max((s - 1.0).abs()))
    }
}

/// Builds `H` with `Phi_coarse = Phi_fine H`. Grids must be nested with one
/// new knot per coarse interval; identical grids give the identity.
pub fn refinement_matrix(coarse: &BrokenBasis, fine: &BrokenBasis) -> Result<RefinementMatrix> {
    let m = coarse.order();
    if fine.order() != m {
        return Err(Error::InvalidFamily(
            "coarse and fine bases have different orders".into(),
        ));
    }
    let n = coarse.grid().len();
    if fine.grid() == coarse.grid() {
        return Ok(RefinementMatrix {
            order: m,
            coarse_knots: n,
            matrix: BandColumns::identity(coarse.len()),
        });
    }
    let nf = fine.grid().len();
    if nf != 2 * n - 1 {
        return Err(Error::InvalidGrid(alloc::format!(
            "fine grid has {nf} knots, expected {}",
            2 * n - 1
        )));
    }
    for (k, x) in coarse.grid().knots().iter().enumerate() {
        if fine.grid().knot(2 * k).to_bits() != x.to_bits() {
            return Err(Error::InvalidGrid(alloc::format!(
                "fine knot {} does not match coarse knot {k}",
                2 * k
            )));
        }
    }

    let jumps = JumpMatrix::new(fine);
    let cols = coarse.len();
    let rows = fine.len();
    let mut h = BandColumns::zeros(rows, cols);
    // running row sums over the columns done so far
    let mut acc = vec![0.0; rows];
    for k in 0..cols {
        let lo = row_lo(k, m);
        let hi = row_hi(k, n);
        let fixed_end = if k + 1 < cols { row_lo(k + 1, m) } else { hi + 1 };
        let mut column = BandColumn {
            start: lo,
            values: vec![0.0; hi + 1 - lo],
        };
        for l in lo..fixed_end {
            column.values[l - lo] = 1.0 - acc[l];
        }
        if fixed_end <= hi {
            let unknowns: Vec<usize> = (fixed_end..=hi).collect();
            // odd knots i whose jump row can meet rows lo..=hi
            let first = (lo + 1).saturating_sub(m).max(1);
            let last = (hi + 1).min(nf - 2);
            let knots: Vec<usize> = (first..=last).filter(|i| i % 2 == 1).collect();
            if knots.len() < unknowns.len() {
                return Err(Error::Conditioning {
                    context: "refinement column",
                    index: Some(k),
                    rcond: 0.0,
                });
            }
            let mut a = Matrix::zeros(knots.len(), unknowns.len());
            let mut b = vec![0.0; knots.len()];
            for (e, &i) in knots.iter().enumerate() {
                let mut scale = 0.0f64;
                for l in lo..=hi {
                    scale = scale.max(jumps.at_knot(i, l).abs());
                }
                if scale == 0.0 {
                    scale = 1.0;
                }
                for (u, &l) in unknowns.iter().enumerate() {
                    a[(e, u)] = jumps.at_knot(i, l) / scale;
                }
                b[e] = -(lo..fixed_end)
                    .map(|l| jumps.at_knot(i, l) * column.values[l - lo])
                    .sum::<f64>()
                    / scale;
            }
            let ls = least_squares(&a, &b);
            if !(ls.rdiag_ratio >= RCOND_MIN) {
                return Err(Error::Conditioning {
                    context: "refinement column",
                    index: Some(k),
                    rcond: ls.rdiag_ratio,
                });
            }
            let bnorm = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let resid = ls.residual / bnorm.max(1.0);
            if !(resid <= REFINEMENT_TOLERANCE) {
                return Err(Error::Inconsistent {
                    context: "refinement jumps",
                    index: k,
                    residual: resid,
                });
            }
            for (u, &l) in unknowns.iter().enumerate() {
                column.values[l - lo] = ls.solution[u];
            }
        }
        for (d, v) in column.values.iter().enumerate() {
            acc[lo + d] += v;
        }
        column.trim();
        *h.column_mut(k) = column;
    }

    let refinement = RefinementMatrix {
        order: m,
        coarse_knots: n,
        matrix: h,
    };
    let worst = knot_residual(coarse, fine, &refinement)?;
    if !(worst.0 <= REFINEMENT_TOLERANCE) {
        return Err(Error::Inconsistent {
            context: "two-scale relation",
            index: worst.1,
            residual: worst.0,
        });
    }
    Ok(refinement)
}

/// Largest mismatch of `Phi_coarse - Phi_fine H` over one-sided derivatives
/// `0..m-1` at every fine knot, each derivative scaled by the local fine
/// width to its order. Returns the residual and the worst knot.
pub fn knot_residual(
    coarse: &BrokenBasis,
    fine: &BrokenBasis,
    h: &RefinementMatrix,
) -> Result<(f64, usize)> {
    let m = coarse.order();
    let g = fine.grid();
    let mut worst = (0.0f64, 0usize);
    for p in 0..g.len() {
        let x = g.knot(p);
        for side in [Side::Left, Side::Right] {
            let width = match side {
                Side::Left if p > 0 => g.width(p - 1),
                Side::Right if p + 1 < g.len() => g.width(p),
                _ => continue,
            };
            let mut scale = 1.0;
            for r in 0..m {
                let want = coarse.evaluate_side(x, r, side)?;
                let fine_vals: Vec<f64> = (0..fine.len())
                    .map(|l| fine.knot_derivative(l, p, r, side))
                    .collect();
                let got = h.matrix.transpose_mul_vec(&fine_vals);
                let size = want.iter().fold(0.0f64, |a, v| a.max(v.abs())) * scale;
                for (a, b) in want.iter().zip(&got) {
                    let e = (a - b).abs() * scale / size.max(1.0);
                    if e > worst.0 {
                        worst = (e, p);
                    }
                }
                scale *= width;
            }
        }
    }
    Ok(worst)
}

/// `max_x max_k |phi_k(x) - (Phi_fine(x) H)_k|` over `samples`.
pub fn two_scale_residual(
    coarse: &BrokenBasis,
    fine: &BrokenBasis,
    h: &RefinementMatrix,
    samples: &[f64],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in samples {
        let want = coarse.evaluate(x, 0)?;
        let got = h.matrix.transpose_mul_vec(&fine.evaluate(x, 0)?);
        for (a, b) in want.iter().zip(&got) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::KnotGrid;
    use crate::smooth::SmoothFamily;

    fn pair(order: usize, coarse: &[f64], fine: &[f64]) -> (BrokenBasis, BrokenBasis) {
        let f = SmoothFamily::powers(order).unwrap();
        (
            BrokenBasis::build(&f, &KnotGrid::new(coarse.to_vec()).unwrap()).unwrap(),
            BrokenBasis::build(&f, &KnotGrid::new(fine.to_vec()).unwrap()).unwrap(),
        )
    }

    #[test]
    fn hat_jump() {
        let (_, fine) = pair(2, &[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let j = JumpMatrix::new(&fine);
        assert!((j.at_knot(1, 1) + 8.0).abs() < 1e-12);
        assert_eq!(j.at_knot(1, 4), 0.0);
        for r in 0..j.rows() {
            let s: f64 = j.row(r).values.iter().sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn hat_mask() {
        let (c, f) = pair(2, &[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let h = refinement_matrix(&c, &f).unwrap();
        let col = h.matrix().column(1);
        assert_eq!(col.start, 1);
        for (a, b) in col.values.iter().zip([0.5, 1.0, 0.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(h.row_sum_deviation() < 1e-14);
    }

    #[test]
    fn hat_nonequispaced_weight() {
        let (c, f) = pair(2, &[0.0, 0.4, 1.0], &[0.0, 0.1, 0.4, 0.85, 1.0]);
        let h = refinement_matrix(&c, &f).unwrap();
        // new knot 0.85 between 0.4 and 1.0, column 1 peaks at 0.4
        assert!((h.get(3, 1) - (1.0 - 0.85) / 0.6).abs() < 1e-12);
    }

    #[test]
    fn cubic_mask() {
        let coarse: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let fine: Vec<f64> = (0..17).map(|i| i as f64 / 16.0).collect();
        let (c, f) = pair(4, &coarse, &fine);
        let h = refinement_matrix(&c, &f).unwrap();
        let k = 5;
        let want = [0.125, 0.5, 0.75, 0.5, 0.125];
        for (d, w) in want.iter().enumerate() {
            assert!((h.get(2 * k - 3 + d, k) - w).abs() < 1e-9);
        }
        assert_eq!(h.get(0, 0), 1.0);
        for k in 1..h.cols() {
            assert_eq!(h.get(0, k), 0.0);
        }
    }

    #[test]
    fn identity_when_not_refined() {
        let (c, _) = pair(3, &[0.0, 0.3, 0.7, 1.0], &[0.0, 0.3, 0.7, 1.0]);
        let h = refinement_matrix(&c, &c).unwrap();
        assert_eq!(h.matrix(), &BandColumns::identity(c.len()));
        assert_eq!(h.row_sum_deviation(), 0.0);
    }
}
