//! Broken bases: compactly supported functions welded from segments of a
//! smooth family.
//!
//! On a grid with `n` knots and a family of order `m`, function `phi_k`
//! (`k = 0 .. n + m - 3`) lives on intervals `max(0, k - m + 1) ..= min(k, n - 2)`
//! and is `Omega(x) a_{k,i}` on interval `i`. The segments are glued with
//! `m - 2` continuous derivatives, clamped at both ends and summed to `w_0`.
//!
//! Internally every interval works in the family re-centered at its
//! midpoint (see [`SmoothFamily::localize`]); the unknowns are the
//! coefficients `b_{k,i}` in that local frame, and `a_{k,i} = L_i b_{k,i}`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::hermite::HermiteSurrogate;
use crate::knots::{min_knots, KnotGrid};
use crate::linalg::{BandCholesky, BandLu, BandMatrix, Lu, Matrix};
use crate::quadrature::GaussLegendre;
use crate::smooth::{SmoothFamily, SmoothFunction, RCOND_MIN};

/// Relative residual allowed per equation of the basis system.
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// Smallest accepted reciprocal condition of the assembled basis system.
pub const SYSTEM_RCOND_MIN: f64 = 1e-13;

/// Which one-sided limit to take at a knot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Broken basis on one grid.
#[derive(Debug, Clone)]
pub struct BrokenBasis {
    family: SmoothFamily,
    grid: KnotGrid,
    local: Vec<SmoothFamily>,
    local_maps: Vec<Matrix>,
    // b[((i * m) + s) * m + q]: local coefficient q of phi_{i+s} on interval i
    coeffs: Vec<f64>,
    expansion: Matrix,
    // knot data, same layout with derivative order in place of q
    at_left: Vec<f64>,
    at_right: Vec<f64>,
    // per interval: m basis segments followed by the m family members
    surrogate: HermiteSurrogate,
}

fn equilibrated_rcond(a: &Matrix) -> f64 {
    let mut s = a.clone();
    let (r, c) = (s.rows(), s.cols());
    for i in 0..r {
        let m = s.row(i).iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if m > 0.0 {
            s.row_mut(i).iter_mut().for_each(|v| *v /= m);
        }
    }
    for j in 0..c {
        let m = (0..r).fold(0.0f64, |acc, i| acc.max(s[(i, j)].abs()));
        if m > 0.0 {
            for i in 0..r {
                s[(i, j)] /= m;
            }
        }
    }
    Lu::new(&s).rcond()
}

struct Equation {
    terms: Vec<(usize, f64)>,
    rhs: f64,
}

impl BrokenBasis {
    /// Solves for the segment coefficients of the broken basis on `grid`.
    pub fn build(family: &SmoothFamily, grid: &KnotGrid) -> Result<Self> {
        let m = family.order();
        let n = grid.len();
        let required = min_knots(m);
        if n < required {
            return Err(Error::GridTooSmall { knots: n, required });
        }
        let intervals = n - 1;
        let count = n + m - 2;
        let (local, local_maps) = Self::local_frames(family, grid);

        // Derivative blocks at both ends of every interval, local frame.
        let mut wl = Vec::with_capacity(intervals);
        let mut wr = Vec::with_capacity(intervals);
        for i in 0..intervals {
            let a = local[i].evaluate(grid.knot(i), m - 1)?;
            let b = local[i].evaluate(grid.knot(i + 1), m - 1)?;
            for w in [&a, &b] {
                let rc = equilibrated_rcond(w);
                if !(rc >= RCOND_MIN) {
                    return Err(Error::Conditioning {
                        context: "collocation block",
                        index: Some(i),
                        rcond: rc,
                    });
                }
            }
            wl.push(a);
            wr.push(b);
        }

        let col = |i: usize, s: usize, q: usize| (i * m + s) * m + q;
        let unknowns = intervals * m * m;
        let mut eqs: Vec<Equation> = Vec::with_capacity(unknowns);
        for i in 0..intervals {
            if i == 0 {
                // clamped start: phi_k has min(k, m-1) vanishing derivatives
                for s in 0..m {
                    for r in 0..s.min(m - 1) {
                        eqs.push(Equation {
                            terms: (0..m).map(|q| (col(0, s, q), wl[0][(r, q)])).collect(),
                            rhs: 0.0,
                        });
                    }
                }
            }
            for q in 0..m {
                eqs.push(Equation {
                    terms: (0..m).map(|s| (col(i, s, q), 1.0)).collect(),
                    rhs: if q == 0 { 1.0 } else { 0.0 },
                });
            }
            let p = i + 1;
            if p < n - 1 {
                // interior knot p; the function starting at p has no rows here
                for k in p - 1..p + m - 1 {
                    for r in 0..m - 1 {
                        let mut terms = Vec::with_capacity(2 * m);
                        if k >= i && k - i < m {
                            terms.extend((0..m).map(|q| (col(i, k - i, q), wr[i][(r, q)])));
                        }
                        if k >= p && k - p < m {
                            terms.extend((0..m).map(|q| (col(p, k - p, q), -wl[p][(r, q)])));
                        }
                        eqs.push(Equation { terms, rhs: 0.0 });
                    }
                }
            }
            if i == intervals - 1 {
                for s in 0..m {
                    let mirrored = count - 1 - (i + s);
                    for r in 0..mirrored.min(m - 1) {
                        eqs.push(Equation {
                            terms: (0..m).map(|q| (col(i, s, q), wr[i][(r, q)])).collect(),
                            rhs: 0.0,
                        });
                    }
                }
            }
        }
        if eqs.len() != unknowns {
            return Err(Error::Assembly {
                unknowns,
                equations: eqs.len(),
            });
        }

        let mut a = BandMatrix::new(unknowns);
        let mut rhs = Vec::with_capacity(unknowns);
        for (row, e) in eqs.iter().enumerate() {
            for &(c, v) in &e.terms {
                if v != 0.0 {
                    a.add(row, c, v);
                }
            }
            rhs.push(e.rhs);
        }
        let per_interval = m * m;
        let lu = BandLu::new(&a);
        let rc = lu.rcond();
        if lu.is_singular() || !(rc >= SYSTEM_RCOND_MIN) {
            return Err(Error::Conditioning {
                context: "basis system",
                index: Some(lu.weakest_pivot() / per_interval),
                rcond: rc,
            });
        }
        let coeffs = lu.solve(&rhs);
        let ax = a.mul_vec(&coeffs);
        for row in 0..unknowns {
            let res = (ax[row] - rhs[row]).abs();
            let terms = &eqs[row].terms;
            let norm: f64 = terms.iter().map(|t| t.1.abs()).sum();
            let size = terms.iter().fold(0.0f64, |acc, t| acc.max(coeffs[t.0].abs()));
            let denom = norm * size + rhs[row].abs();
            let rel = if denom > 0.0 { res / denom } else { res };
            if !(rel <= SOLVE_TOLERANCE) {
                let interval = eqs[row].terms.first().map_or(0, |t| t.0 / per_interval);
                return Err(Error::Inconsistent {
                    context: "basis system",
                    index: interval,
                    residual: rel,
                });
            }
        }
        Self::finish(family.clone(), grid.clone(), local, local_maps, coeffs)
    }

    /// Rebuilds a basis from segment coefficients in the coordinates of the
    /// family itself, laid out as [`BrokenBasis::global_coefficients`].
    pub fn from_global_coefficients(
        family: &SmoothFamily,
        grid: &KnotGrid,
        global: &[f64],
    ) -> Result<Self> {
        let m = family.order();
        let intervals = grid.interval_count();
        let expected = intervals * m * m;
        if global.len() != expected {
            return Err(Error::Shape {
                expected,
                found: global.len(),
            });
        }
        let (local, local_maps) = Self::local_frames(family, grid);
        let mut coeffs = vec![0.0; expected];
        for i in 0..intervals {
            let lu = Lu::new(&local_maps[i]);
            for s in 0..m {
                let at = (i * m + s) * m;
                let b = lu.solve(&global[at..at + m]);
                coeffs[at..at + m].copy_from_slice(&b);
            }
        }
        Self::finish(family.clone(), grid.clone(), local, local_maps, coeffs)
    }

    fn local_frames(family: &SmoothFamily, grid: &KnotGrid) -> (Vec<SmoothFamily>, Vec<Matrix>) {
        (0..grid.interval_count())
            .map(|i| {
                let c = 0.5 * (grid.knot(i) + grid.knot(i + 1));
                (family.localize(c), family.localization_matrix(c))
            })
            .unzip()
    }

    fn finish(
        family: SmoothFamily,
        grid: KnotGrid,
        local: Vec<SmoothFamily>,
        local_maps: Vec<Matrix>,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        let m = family.order();
        let intervals = grid.interval_count();
        let count = grid.len() + m - 2;

        let mut at_left = vec![0.0; intervals * m * m];
        let mut at_right = vec![0.0; intervals * m * m];
        let mut s_left = vec![0.0; intervals * 2 * m * m];
        let mut s_right = vec![0.0; intervals * 2 * m * m];
        for i in 0..intervals {
            let wl = local[i].evaluate(grid.knot(i), m - 1)?;
            let wr = local[i].evaluate(grid.knot(i + 1), m - 1)?;
            let gl = family.evaluate(grid.knot(i), m - 1)?;
            let gr = family.evaluate(grid.knot(i + 1), m - 1)?;
            for s in 0..m {
                let b = &coeffs[(i * m + s) * m..(i * m + s + 1) * m];
                for r in 0..m {
                    let l: f64 = (0..m).map(|q| wl[(r, q)] * b[q]).sum();
                    let rr: f64 = (0..m).map(|q| wr[(r, q)] * b[q]).sum();
                    at_left[(i * m + s) * m + r] = l;
                    at_right[(i * m + s) * m + r] = rr;
                    s_left[(i * 2 * m + s) * m + r] = l;
                    s_right[(i * 2 * m + s) * m + r] = rr;
                }
            }
            for q in 0..m {
                for r in 0..m {
                    s_left[(i * 2 * m + m + q) * m + r] = gl[(r, q)];
                    s_right[(i * 2 * m + m + q) * m + r] = gr[(r, q)];
                }
            }
        }
        let surrogate = HermiteSurrogate::from_data(&grid, m, 2 * m, &s_left, &s_right);

        // Expansion matrix: Omega = Phi_i B_i^{-1} L_i^{-1} on interval i,
        // rows averaged over the intervals that share them.
        let mut expansion = Matrix::zeros(count, m);
        let mut hits = vec![0usize; count];
        for i in 0..intervals {
            let block = Matrix::from_fn(m, m, |q, s| coeffs[(i * m + s) * m + q]);
            let rc = equilibrated_rcond(&block);
            if !(rc >= RCOND_MIN) {
                return Err(Error::Conditioning {
                    context: "expansion block",
                    index: Some(i),
                    rcond: rc,
                });
            }
            let rows = Lu::new(&block)
                .inverse()
                .mul(&Lu::new(&local_maps[i]).inverse());
            for s in 0..m {
                for q in 0..m {
                    expansion[(i + s, q)] += rows[(s, q)];
                }
                hits[i + s] += 1;
            }
        }
        for (k, h) in hits.iter().enumerate() {
            for q in 0..m {
                expansion[(k, q)] /= *h as f64;
            }
        }

        Ok(Self {
            family,
            grid,
            local,
            local_maps,
            coeffs,
            expansion,
            at_left,
            at_right,
            surrogate,
        })
    }

    pub fn family(&self) -> &SmoothFamily {
        &self.family
    }

    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    /// Number of basis functions, `n + m - 2`.
    pub fn len(&self) -> usize {
        self.grid.len() + self.order() - 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Intervals carrying a segment of `phi_k`.
    pub fn intervals(&self, k: usize) -> RangeInclusive<usize> {
        let m = self.order();
        let lo = (k + 1).saturating_sub(m);
        let hi = k.min(self.grid.interval_count() - 1);
        lo..=hi
    }

    /// Support `[x_lo, x_hi]` of `phi_k` as knot indices.
    pub fn support(&self, k: usize) -> (usize, usize) {
        let r = self.intervals(k);
        (*r.start(), *r.end() + 1)
    }

    /// Segment coefficients of `phi_k` on interval `i` in the local frame of
    /// that interval.
    pub fn local_segment(&self, k: usize, i: usize) -> Option<&[f64]> {
        let m = self.order();
        if !self.intervals(k).contains(&i) {
            return None;
        }
        let at = (i * m + (k - i)) * m;
        Some(&self.coeffs[at..at + m])
    }

    /// Segment coefficients `a_{k,i}` of `phi_k` on interval `i` in the
    /// coordinates of the family.
    pub fn segment(&self, k: usize, i: usize) -> Option<Vec<f64>> {
        self.local_segment(k, i).map(|b| self.local_maps[i].mul_vec(b))
    }

    /// All `a_{k,i}`, interval by interval (`((i * m) + k - i) * m + q`).
    pub fn global_coefficients(&self) -> Vec<f64> {
        let m = self.order();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for i in 0..self.grid.interval_count() {
            for s in 0..m {
                let at = (i * m + s) * m;
                out.extend(self.local_maps[i].mul_vec(&self.coeffs[at..at + m]));
            }
        }
        out
    }

    /// Local frame of interval `i`.
    pub fn local_family(&self, i: usize) -> &SmoothFamily {
        &self.local[i]
    }

    /// Expansion matrix `A` with `Omega = Phi A`.
    pub fn expansion_matrix(&self) -> &Matrix {
        &self.expansion
    }

    pub fn surrogate(&self) -> &HermiteSurrogate {
        &self.surrogate
    }

    /// `r`-th derivative of `phi_k` at knot `p`, limit from `side`.
    pub fn knot_derivative(&self, k: usize, p: usize, r: usize, side: Side) -> f64 {
        let m = self.order();
        let i = match side {
            Side::Left if p > 0 => p - 1,
            Side::Right if p < self.grid.len() - 1 => p,
            _ => return 0.0,
        };
        if !self.intervals(k).contains(&i) {
            return 0.0;
        }
        let at = (i * m + (k - i)) * m + r;
        match side {
            Side::Left => self.at_right[at],
            Side::Right => self.at_left[at],
        }
    }

    /// Jump (right minus left) of the `(m-1)`-th derivative of `phi_k` at
    /// knot `p`.
    pub fn jump(&self, k: usize, p: usize) -> f64 {
        let r = self.order() - 1;
        self.knot_derivative(k, p, r, Side::Right) - self.knot_derivative(k, p, r, Side::Left)
    }

    /// Values of `phi_{i}, .., phi_{i+m-1}` on interval `i` (segments
    /// continued to `x`). Tabulated families fall back to the Hermite
    /// surrogate away from their grids.
    pub fn segment_values(&self, i: usize, x: f64, deriv: usize, out: &mut [f64]) -> Result<()> {
        let m = self.order();
        let mut row = vec![0.0; m];
        match self.local[i].derivative_row(x, deriv, &mut row) {
            Ok(()) => {
                for (s, o) in out.iter_mut().enumerate().take(m) {
                    let b = &self.coeffs[(i * m + s) * m..(i * m + s + 1) * m];
                    *o = row.iter().zip(b).map(|(w, c)| w * c).sum();
                }
                Ok(())
            }
            Err(Error::UnsupportedPoint { .. }) => {
                for (s, o) in out.iter_mut().enumerate().take(m) {
                    *o = self.surrogate.eval(i, s, x, deriv);
                }
                Ok(())
            }
            Err(e) => Err(e),
        }
    }

    fn check_request(&self, x: f64, deriv: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain { x });
        }
        if deriv >= self.order() {
            return Err(Error::DerivativeOrder {
                requested: deriv,
                available: self.order() - 1,
            });
        }
        Ok(())
    }

    fn evaluate_on(&self, i: usize, x: f64, deriv: usize) -> Result<Vec<f64>> {
        let m = self.order();
        let mut out = vec![0.0; self.len()];
        self.segment_values(i, x, deriv, &mut out[i..i + m])?;
        Ok(out)
    }

    /// All basis functions (derivative `deriv`) at `x`. Interior knots take
    /// the limit from the left.
    pub fn evaluate(&self, x: f64, deriv: usize) -> Result<Vec<f64>> {
        self.check_request(x, deriv)?;
        self.evaluate_on(self.grid.interval_of(x), x, deriv)
    }

    /// Like [`BrokenBasis::evaluate`] with an explicit one-sided limit at
    /// knots. Away from knots both sides agree.
    pub fn evaluate_side(&self, x: f64, deriv: usize, side: Side) -> Result<Vec<f64>> {
        self.check_request(x, deriv)?;
        let mut i = self.grid.interval_of(x);
        if side == Side::Right {
            if let Some(p) = self.grid.position(x) {
                i = p.min(self.grid.interval_count() - 1);
            }
        }
        self.evaluate_on(i, x, deriv)
    }

    /// All basis functions evaluated through the Hermite surrogate.
    pub fn evaluate_surrogate(&self, x: f64, deriv: usize) -> Result<Vec<f64>> {
        self.check_request(x, deriv)?;
        let m = self.order();
        let i = self.grid.interval_of(x);
        let mut out = vec![0.0; self.len()];
        for s in 0..m {
            out[i + s] = self.surrogate.eval(i, s, x, deriv);
        }
        Ok(out)
    }

    /// Largest derivative jump of orders `0..m-2` over interior knots,
    /// relative to the local derivative magnitude (at least 1).
    pub fn max_continuity_defect(&self) -> f64 {
        let m = self.order();
        let mut worst = 0.0f64;
        for p in 1..self.grid.len() - 1 {
            for k in (p + 1).saturating_sub(m)..(p + m).min(self.len()) {
                for r in 0..m - 1 {
                    let l = self.knot_derivative(k, p, r, Side::Left);
                    let rr = self.knot_derivative(k, p, r, Side::Right);
                    let scale = 1.0f64.max(l.abs()).max(rr.abs());
                    worst = worst.max((l - rr).abs() / scale);
                }
            }
        }
        worst
    }

    /// Largest derivative (relative as above) that the clamped end
    /// conditions require to vanish.
    pub fn max_boundary_defect(&self) -> f64 {
        let m = self.order();
        let n = self.len();
        let last = self.grid.len() - 1;
        let mut worst = 0.0f64;
        for k in 0..n {
            let scale = |p: usize, side: Side| {
                (0..m)
                    .map(|r| self.knot_derivative(k, p, r, side).abs())
                    .fold(1.0f64, f64::max)
            };
            let s0 = scale(0, Side::Right);
            for r in 0..k.min(m - 1) {
                worst = worst.max(self.knot_derivative(k, 0, r, Side::Right).abs() / s0);
            }
            let s1 = scale(last, Side::Left);
            for r in 0..(n - 1 - k).min(m - 1) {
                worst = worst.max(self.knot_derivative(k, last, r, Side::Left).abs() / s1);
            }
        }
        worst
    }

    /// Integrals of surrogate segments against `x^q`, `q = 0..=max_q`.
    pub fn moments(&self, max_q: usize) -> MomentTable {
        let m = self.order();
        let intervals = self.grid.interval_count();
        let rule = GaussLegendre::new((2 * m + max_q).div_ceil(2));
        let stride = max_q + 1;
        let mut data = vec![0.0; intervals * m * stride];
        for i in 0..intervals {
            let (a, b) = (self.grid.knot(i), self.grid.knot(i + 1));
            for (x, w) in rule.mapped(a, b) {
                for s in 0..m {
                    let v = w * self.surrogate.eval(i, s, x, 0);
                    let mut xp = 1.0;
                    for q in 0..stride {
                        data[(i * m + s) * stride + q] += v * xp;
                        xp *= x;
                    }
                }
            }
        }
        MomentTable {
            order: m,
            count: self.len(),
            max_q,
            data,
        }
    }

    fn gram_rule(&self) -> GaussLegendre {
        GaussLegendre::new(2 * self.order() + 4)
    }

    /// Banded Gram matrix of the basis on `[0, 1]`.
    pub fn gram_matrix(&self) -> Result<GramMatrix> {
        let m = self.order();
        let n = self.len();
        let rule = self.gram_rule();
        let mut lower = vec![0.0; n * m];
        let mut vals = vec![0.0; m];
        for i in 0..self.grid.interval_count() {
            let (a, b) = (self.grid.knot(i), self.grid.knot(i + 1));
            for (x, w) in rule.mapped(a, b) {
                self.segment_values(i, x, 0, &mut vals)?;
                for s in 0..m {
                    for t in 0..=s {
                        lower[(i + s) * m + (s - t)] += w * vals[s] * vals[t];
                    }
                }
            }
        }
        Ok(GramMatrix {
            dim: n,
            width: m,
            lower,
        })
    }

    /// `L2` inner products of every basis function with `f`.
    pub fn inner_products(&self, f: &dyn Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
        let m = self.order();
        let rule = self.gram_rule();
        let mut out = vec![0.0; self.len()];
        let mut vals = vec![0.0; m];
        for i in 0..self.grid.interval_count() {
            let (a, b) = (self.grid.knot(i), self.grid.knot(i + 1));
            for (x, w) in rule.mapped(a, b) {
                self.segment_values(i, x, 0, &mut vals)?;
                let fx = f(x)?;
                for s in 0..m {
                    out[i + s] += w * fx * vals[s];
                }
            }
        }
        Ok(out)
    }

    /// Coefficients of the `L2` projection of `f` onto the span.
    pub fn project_coefficients(&self, f: &dyn Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
        let chol = self.gram_matrix()?.cholesky()?;
        Ok(chol.solve(&self.inner_products(f)?))
    }

    /// `sum_k c_k phi_k(x)`.
    pub fn combine(&self, coefficients: &[f64], x: f64, deriv: usize) -> Result<f64> {
        if coefficients.len() != self.len() {
            return Err(Error::Shape {
                expected: self.len(),
                found: coefficients.len(),
            });
        }
        let v = self.evaluate(x, deriv)?;
        Ok(v.iter().zip(coefficients).map(|(a, b)| a * b).sum())
    }

    /// Orthogonal projection of `target`, with pointwise errors
    /// `target(x) - (Phi c)(x)` at `samples`.
    pub fn project(&self, target: &SmoothFunction, samples: &[f64]) -> Result<Projection> {
        let f = |x: f64| target.derivative(x, 0);
        let coefficients = self.project_coefficients(&f)?;
        let errors = samples
            .iter()
            .map(|&x| Ok(f(x)? - self.combine(&coefficients, x, 0)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Projection {
            coefficients,
            errors,
        })
    }
}

/// Result of [`BrokenBasis::project`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coefficients: Vec<f64>,
    pub errors: Vec<f64>,
}

impl Projection {
    pub fn max_error(&self) -> f64 {
        self.errors.iter().fold(0.0, |a, e| a.max(e.abs()))
    }
}

/// Per-interval moments `M_{k,i,q}` of the surrogate basis.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    order: usize,
    count: usize,
    max_q: usize,
    data: Vec<f64>,
}

impl MomentTable {
    pub fn max_q(&self) -> usize {
        self.max_q
    }

    /// `int_{x_i}^{x_{i+1}} phi_k x^q dx`, zero when `phi_k` has no
    /// segment on interval `i`.
    pub fn get(&self, k: usize, i: usize, q: usize) -> f64 {
        let m = self.order;
        let intervals = self.data.len() / (m * (self.max_q + 1));
        if q > self.max_q || i >= intervals || k < i || k - i >= m || k >= self.count {
            return 0.0;
        }
        self.data[(i * m + (k - i)) * (self.max_q + 1) + q]
    }

    /// `int_0^1 phi_k x^q dx`.
    pub fn total(&self, k: usize, q: usize) -> f64 {
        let m = self.order;
        let hi = k + 1;
        let lo = hi.saturating_sub(m);
        (lo..hi).map(|i| self.get(k, i, q)).sum()
    }

    /// Totals for every basis function at one `q`.
    pub fn totals(&self, q: usize) -> Vec<f64> {
        (0..self.count).map(|k| self.total(k, q)).collect()
    }
}

/// Symmetric band matrix of inner products; `width` is the number of stored
/// diagonals (main diagonal included).
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    dim: usize,
    width: usize,
    // lower[k * width + d] = G(k, k - d)
    lower: Vec<f64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        let (hi, lo) = if k >= l { (k, l) } else { (l, k) };
        let d = hi - lo;
        if d >= self.width {
            0.0
        } else {
            self.lower[hi * self.width + d]
        }
    }

    pub fn cholesky(&self) -> Result<BandCholesky> {
        BandCholesky::new(self.dim, self.width - 1, |i, j| self.get(i, j)).ok_or(
            Error::Conditioning {
                context: "gram matrix",
                index: None,
                rcond: 0.0,
            },
        )
    }
}
