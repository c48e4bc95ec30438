//! Two-point Hermite interpolation between knots.
//!
//! Knot data (values and derivatives `0..m-1` at both ends of an interval)
//! pins down a unique polynomial of degree `2m - 1` per interval. This is
//! what the basis falls back on between knots when the building functions
//! are only tabulated, and what the moment integrals are computed from.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::knots::KnotGrid;
use crate::linalg::{Lu, Matrix};

/// Piecewise polynomials of degree `2m - 1` for a fixed number of functions
/// per interval, stored in the local variable `t = (x - x_i) / h_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteSurrogate {
    grid: KnotGrid,
    order: usize,
    per_interval: usize,
    // coeffs[(i * per_interval + f) * 2m + p]: coefficient of t^p
    coeffs: Vec<f64>,
}

/// Inverse of the confluent system mapping monomial coefficients in `t` to
/// derivative data at `t = 0` and `t = 1`.
fn hermite_inverse(order: usize) -> Matrix {
    let size = 2 * order;
    let mut m = Matrix::zeros(size, size);
    for r in 0..order {
        // t = 0
        let mut fact = 1.0;
        for k in 1..=r {
            fact *= k as f64;
        }
        m[(r, r)] = fact;
        // t = 1
        for p in r..size {
            let mut c = 1.0;
            for k in 0..r {
                c *= (p - k) as f64;
            }
            m[(order + r, p)] = c;
        }
    }
    Lu::new(&m).inverse()
}

impl HermiteSurrogate {
    /// `left[(i * per_interval + f) * m + r]` holds the `r`-th derivative of
    /// function `f` of interval `i` at `x_i` (limit from inside the
    /// interval); `right` likewise at `x_{i+1}`.
    pub fn from_data(
        grid: &KnotGrid,
        order: usize,
        per_interval: usize,
        left: &[f64],
        right: &[f64],
    ) -> Self {
        let intervals = grid.interval_count();
        assert_eq!(left.len(), intervals * per_interval * order);
        assert_eq!(right.len(), left.len());
        let inv = hermite_inverse(order);
        let size = 2 * order;
        let mut coeffs = vec![0.0; intervals * per_interval * size];
        let mut data = vec![0.0; size];
        for i in 0..intervals {
            let h = grid.width(i);
            for f in 0..per_interval {
                let base = (i * per_interval + f) * order;
                let mut scale = 1.0;
                for r in 0..order {
                    data[r] = left[base + r] * scale;
                    data[order + r] = right[base + r] * scale;
                    scale *= h;
                }
                let c = inv.mul_vec(&data);
                let out = (i * per_interval + f) * size;
                coeffs[out..out + size].copy_from_slice(&c);
            }
        }
        Self {
            grid: grid.clone(),
            order,
            per_interval,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn per_interval(&self) -> usize {
        self.per_interval
    }

    /// Polynomial coefficients (in `t`) of function `f` on interval `i`.
    pub fn polynomial(&self, i: usize, f: usize) -> &[f64] {
        let size = 2 * self.order;
        let at = (i * self.per_interval + f) * size;
        &self.coeffs[at..at + size]
    }

    /// `deriv`-th derivative in `x` of function `f` of interval `i` at `x`.
    pub fn eval(&self, i: usize, f: usize, x: f64, deriv: usize) -> f64 {
        let h = self.grid.width(i);
        let t = (x - self.grid.knot(i)) / h;
        let poly = self.polynomial(i, f);
        let mut acc = 0.0;
        for p in (deriv..poly.len()).rev() {
            let mut c = poly[p];
            for k in 0..deriv {
                c *= (p - k) as f64;
            }
            acc = acc * t + c;
        }
        acc / h.powi(deriv as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_from_first_derivatives() {
        // m = 2: degree 3 polynomial from value + slope at both ends
        let grid = KnotGrid::new(vec![0.0, 0.3, 1.0]).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let dp = |x: f64| -2.0 + 1.5 * x * x;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for i in 0..2 {
            let (a, b) = (grid.knot(i), grid.knot(i + 1));
            left.extend_from_slice(&[p(a), dp(a)]);
            right.extend_from_slice(&[p(b), dp(b)]);
        }
        let s = HermiteSurrogate::from_data(&grid, 2, 1, &left, &right);
        for x in [0.0, 0.1, 0.29, 0.5, 0.77, 1.0] {
            let i = grid.interval_of(x);
            assert!((s.eval(i, 0, x, 0) - p(x)).abs() < 1e-14);
            assert!((s.eval(i, 0, x, 1) - dp(x)).abs() < 1e-13);
        }
    }
}
