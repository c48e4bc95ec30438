//! Lifting factorization of the interior refinement and wavelet design.
//!
//! After the `ceil(m/2) - 1` leftmost and `floor(m/2) - 1` rightmost
//! functions are set aside, the interior block `H_eo` has `2n - 1` fine rows
//! and `n` coarse columns; column `c` is centered on fine row `2c`. Its even
//! rows `H_e` and odd rows `H_o` are reduced to `[D; 0]` by alternating
//! bidiagonal steps
//!
//! * update: `e_i += U_{i,i-1} o_{i-1} + U_{i,i} o_i`
//! * predict: `o_i -= P_{i,i} e_i + P_{i,i+1} e_{i+1}`
//!
//! each removing the outermost band entries of every column. Running the
//! inverse steps backwards on `[0; I]` gives the primitive details, and a
//! final bidiagonal update buys two vanishing moments.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::BrokenBasis;
use crate::error::{Error, Result};
use crate::linalg::{BandColumn, BandColumns, Lu, Matrix};
use crate::refinement::RefinementMatrix;

/// Entries allowed to survive where the factorization demands zeros.
pub const FACTOR_TOLERANCE: f64 = 1e-10;
/// Smallest admissible scale entry.
pub const SCALE_MIN: f64 = 1e-12;
/// Largest admissible moment of a designed wavelet.
pub const MOMENT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Predict,
    Update,
}

/// One bidiagonal lifting step.
///
/// For a prediction, `coeffs[i] = [P_{i,i}, P_{i,i+1}]` (odd row `i`, even
/// columns `i` and `i + 1`). For an update, `coeffs[i] = [U_{i,i-1},
/// U_{i,i}]` (even row `i`, odd columns `i - 1` and `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingStep {
    pub kind: StepKind,
    pub coeffs: Vec<[f64; 2]>,
}

impl LiftingStep {
    fn zeros(kind: StepKind, evens: usize) -> Self {
        let rows = match kind {
            StepKind::Predict => evens - 1,
            StepKind::Update => evens,
        };
        Self {
            kind,
            coeffs: vec![[0.0; 2]; rows],
        }
    }

    /// `(row, col, value)` of the nonzero entries of the step matrix.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let cols = match self.kind {
                StepKind::Predict => [Some(i), Some(i + 1)],
                StepKind::Update => [i.checked_sub(1), Some(i)],
            };
            for (col, v) in cols.iter().zip(c) {
                if let (Some(col), true) = (col, *v != 0.0) {
                    out.push((i, *col, *v));
                }
            }
        }
        out
    }

    /// Applies the reduction form of the step (analysis direction).
    /// Returns the multiply-add count.
    fn reduce(&self, e: &mut [f64], o: &mut [f64]) -> usize {
        let mut ops = 0;
        match self.kind {
            StepKind::Update => {
                for (i, [l, r]) in self.coeffs.iter().enumerate() {
                    if i > 0 && *l != 0.0 {
                        e[i] += l * o[i - 1];
                        ops += 1;
                    }
                    if i < o.len() && *r != 0.0 {
                        e[i] += r * o[i];
                        ops += 1;
                    }
                }
            }
            StepKind::Predict => {
                for (i, [l, r]) in self.coeffs.iter().enumerate() {
                    if *l != 0.0 {
                        o[i] -= l * e[i];
                        ops += 1;
                    }
                    if *r != 0.0 {
                        o[i] -= r * e[i + 1];
                        ops += 1;
                    }
                }
            }
        }
        ops
    }

    /// Undoes [`LiftingStep::reduce`] (synthesis direction).
    fn restore(&self, e: &mut [f64], o: &mut [f64]) -> usize {
        let mut ops = 0;
        match self.kind {
            StepKind::Update => {
                for (i, [l, r]) in self.coeffs.iter().enumerate() {
                    if i > 0 && *l != 0.0 {
                        e[i] -= l * o[i - 1];
                        ops += 1;
                    }
                    if i < o.len() && *r != 0.0 {
                        e[i] -= r * o[i];
                        ops += 1;
                    }
                }
            }
            StepKind::Predict => {
                for (i, [l, r]) in self.coeffs.iter().enumerate() {
                    if *l != 0.0 {
                        o[i] += l * e[i];
                        ops += 1;
                    }
                    if *r != 0.0 {
                        o[i] += r * e[i + 1];
                        ops += 1;
                    }
                }
            }
        }
        ops
    }
}

/// Which of the two step sequences a given order uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Starts with an update: `U1, P1, .., Uu, Pu`.
    Scheme0,
    /// Starts with an extra prediction: `P0, U1, P1, .., Uu, Pu`.
    Scheme1,
}

/// `(kind, u, r)` with `u = floor((m + 1) / 4)` and `r = ceil(m / 2) - 2u`.
pub fn scheme_parameters(order: usize) -> (SchemeKind, usize, usize) {
    let u = (order + 1) / 4;
    let r = order.div_ceil(2) - 2 * u;
    let kind = if r == 0 {
        SchemeKind::Scheme0
    } else {
        SchemeKind::Scheme1
    };
    (kind, u, r)
}

/// Interior refinement plus the boundary pieces split off around it.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSplit {
    pub order: usize,
    /// Coarse knots `n`; the interior block is `(2n - 1) x n`.
    pub coarse_knots: usize,
    pub left: usize,
    pub right: usize,
    /// Lower-triangular block linking the left boundary functions.
    pub bb_left: Matrix,
    /// Upper-triangular block linking the right boundary functions.
    pub bb_right: Matrix,
    /// Interior fine rows against the boundary coarse columns (left ones
    /// first, then right ones).
    pub eo_b: BandColumns,
    pub eo: BandColumns,
}

impl InteriorSplit {
    /// Even rows of the interior block.
    pub fn even(&self) -> BandColumns {
        self.parity_rows(0)
    }

    /// Odd rows of the interior block.
    pub fn odd(&self) -> BandColumns {
        self.parity_rows(1)
    }

    fn parity_rows(&self, parity: usize) -> BandColumns {
        let rows = (self.eo.rows() + 1 - parity) / 2;
        let mut out = BandColumns::zeros(rows, self.eo.cols());
        for (c, col) in self.eo.columns().iter().enumerate() {
            for r in col.start..col.end() {
                if r % 2 == parity {
                    out.set(r / 2, c, col.get(r));
                }
            }
        }
        out
    }

    /// Coarse index of the `i`-th boundary column of `eo_b`.
    pub fn boundary_column(&self, i: usize) -> usize {
        if i < self.left {
            i
        } else {
            self.left + self.coarse_knots + (i - self.left)
        }
    }
}

/// Splits off the boundary functions and checks that no interior coarse
/// function uses a boundary fine function.
pub fn split_interior(h: &RefinementMatrix) -> Result<InteriorSplit> {
    let m = h.order();
    let n = h.coarse_knots();
    let nf = 2 * n - 1;
    let bl = h.left_boundary();
    let br = h.right_boundary();
    let hm = h.matrix();
    let fine_rows = hm.rows();
    let is_boundary_row = |l: usize| l < bl || l >= bl + nf;

    for k in bl..bl + n {
        let col = hm.column(k);
        for l in col.start..col.end() {
            if is_boundary_row(l) && col.get(l) != 0.0 {
                return Err(Error::Structural {
                    context: "boundary rows of interior columns",
                    row: l,
                    col: k,
                });
            }
        }
    }
    let bb_left = Matrix::from_fn(bl, bl, |r, c| hm.get(r, c));
    let right_rows = fine_rows - br;
    let right_cols = bl + n;
    let bb_right = Matrix::from_fn(br, br, |r, c| hm.get(right_rows + r, right_cols + c));
    for (block, label) in [(&bb_left, "left"), (&bb_right, "right")] {
        for i in 0..block.rows() {
            if !(block[(i, i)].abs() > SCALE_MIN) {
                return Err(Error::Conditioning {
                    context: if label == "left" {
                        "left boundary block"
                    } else {
                        "right boundary block"
                    },
                    index: Some(i),
                    rcond: 0.0,
                });
            }
        }
    }
    // no coupling between the two boundary sides
    for r in 0..bl {
        for c in 0..br {
            if hm.get(r, right_cols + c) != 0.0 {
                return Err(Error::Structural {
                    context: "boundary coupling",
                    row: r,
                    col: right_cols + c,
                });
            }
        }
    }
    for r in 0..br {
        for c in 0..bl {
            if hm.get(right_rows + r, c) != 0.0 {
                return Err(Error::Structural {
                    context: "boundary coupling",
                    row: right_rows + r,
                    col: c,
                });
            }
        }
    }

    let eo = hm.block(bl, bl + nf, bl, bl + n);
    let mut eo_b_cols = Vec::with_capacity(bl + br);
    for k in (0..bl).chain(bl + n..bl + n + br) {
        eo_b_cols.push(hm.block(bl, bl + nf, k, k + 1).columns()[0].clone());
    }
    Ok(InteriorSplit {
        order: m,
        coarse_knots: n,
        left: bl,
        right: br,
        bb_left,
        bb_right,
        eo_b: BandColumns::from_columns(nf, eo_b_cols),
        eo,
    })
}

/// Bidiagonal factors reducing `[H_e; H_o]` to `[D; 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingScheme {
    kind: SchemeKind,
    pairs: usize,
    evens: usize,
    /// Steps in reduction (analysis) order.
    steps: Vec<LiftingStep>,
    scale: Vec<f64>,
}

impl LiftingScheme {
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Number of update/predict pairs `u`.
    pub fn pairs(&self) -> usize {
        self.pairs
    }

    /// Coarse interior size `n`.
    pub fn evens(&self) -> usize {
        self.evens
    }

    /// Number of odd rows, `n - 1`.
    pub fn odds(&self) -> usize {
        self.evens - 1
    }

    /// Steps in the order they are applied during analysis.
    pub fn steps(&self) -> &[LiftingStep] {
        &self.steps
    }

    /// Initial prediction of the second scheme.
    pub fn initial_prediction(&self) -> Option<&LiftingStep> {
        match self.kind {
            SchemeKind::Scheme1 => self.steps.first(),
            SchemeKind::Scheme0 => None,
        }
    }

    /// Diagonal of `D`.
    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    /// Reduces interleaved-split data in place: afterwards `e` holds the
    /// scaled coarse part (before division by `D`). Returns multiply-adds.
    pub fn reduce(&self, e: &mut [f64], o: &mut [f64]) -> usize {
        self.steps.iter().map(|s| s.reduce(e, o)).sum()
    }

    /// Inverse of [`LiftingScheme::reduce`].
    pub fn restore(&self, e: &mut [f64], o: &mut [f64]) -> usize {
        self.steps.iter().rev().map(|s| s.restore(e, o)).sum()
    }

    fn synthesize_column(&self, mut e: Vec<f64>, mut o: Vec<f64>) -> BandColumn {
        self.restore(&mut e, &mut o);
        let mut col = BandColumn::default();
        for (i, v) in e.iter().enumerate() {
            col.set(2 * i, *v);
        }
        for (i, v) in o.iter().enumerate() {
            col.set(2 * i + 1, *v);
        }
        col
    }

    /// Product of the factors applied to `[D; 0]`, which must equal the
    /// interior refinement it was built from.
    pub fn reconstruct(&self) -> BandColumns {
        let n = self.evens;
        let cols = (0..n)
            .map(|c| {
                let mut e = vec![0.0; n];
                e[c] = self.scale[c];
                self.synthesize_column(e, vec![0.0; n - 1])
            })
            .collect();
        BandColumns::from_columns(2 * n - 1, cols)
    }

    /// Primitive details `G0`: the factors applied to `[0; I]`.
    pub fn primitive_details(&self) -> BandColumns {
        let n = self.evens;
        let cols = (0..n - 1)
            .map(|c| {
                let mut o = vec![0.0; n - 1];
                o[c] = 1.0;
                self.synthesize_column(vec![0.0; n], o)
            })
            .collect();
        BandColumns::from_columns(2 * n - 1, cols)
    }
}

/// Euclid-type band elimination of the interior refinement.
pub fn factor(eo: &BandColumns, order: usize) -> Result<LiftingScheme> {
    let nf = eo.rows();
    let n = eo.cols();
    if nf != 2 * n - 1 || n < 2 {
        return Err(Error::Shape {
            expected: 2 * n - 1,
            found: nf,
        });
    }
    let (kind, pairs, r) = scheme_parameters(order);
    let mut kinds = Vec::with_capacity(2 * pairs + r);
    if r == 1 {
        kinds.push(StepKind::Predict);
    }
    for _ in 0..pairs {
        kinds.push(StepKind::Update);
        kinds.push(StepKind::Predict);
    }

    let mut work = eo.clone();
    for c in 0..n {
        work.column_mut(c).trim();
    }
    let mut steps = Vec::with_capacity(kinds.len());
    for (s, &sk) in kinds.iter().enumerate() {
        let parity = match sk {
            StepKind::Predict => 1,
            StepKind::Update => 0,
        };
        let mut step = LiftingStep::zeros(sk, n);
        let mut claimed = vec![[false; 2]; step.coeffs.len()];
        let mut kills: Vec<(usize, usize)> = Vec::new();
        for c in 0..n {
            let col = work.column(c);
            let (lo, hi) = col.range().ok_or(Error::Factoring { step: s, column: c })?;
            let center = 2 * c as isize;
            let (dlo, dhi) = (center - lo as isize, hi as isize - center);
            let mut ends = Vec::with_capacity(2);
            if lo % 2 == parity && lo as isize != center && dlo >= dhi {
                ends.push((lo, lo + 1, 1usize));
            }
            if hi % 2 == parity && hi as isize != center && dhi >= dlo && hi != lo {
                ends.push((hi, hi - 1, 0usize));
            }
            for (x_row, y_row, slot) in ends {
                let y = col.get(y_row);
                if y == 0.0 || y_row < lo || y_row > hi {
                    return Err(Error::Factoring { step: s, column: c });
                }
                let ratio = col.get(x_row) / y;
                let idx = x_row / 2;
                if claimed[idx][slot] {
                    return Err(Error::Factoring { step: s, column: c });
                }
                claimed[idx][slot] = true;
                step.coeffs[idx][slot] = match sk {
                    StepKind::Predict => ratio,
                    StepKind::Update => -ratio,
                };
                kills.push((x_row, c));
            }
        }
        // apply the step to every column
        for c in 0..n {
            let col = work.column(c).clone();
            let Some((lo, hi)) = col.range() else { continue };
            let from = lo.saturating_sub(1);
            let to = (hi + 1).min(nf - 1);
            let mut updated = col.clone();
            for x_row in from..=to {
                if x_row % 2 != parity {
                    continue;
                }
                let [l, rr] = step.coeffs[x_row / 2];
                let left = if x_row > 0 { col.get(x_row - 1) } else { 0.0 };
                let right = col.get(x_row + 1);
                let delta = l * left + rr * right;
                if delta != 0.0 {
                    let v = match sk {
                        StepKind::Predict => col.get(x_row) - delta,
                        StepKind::Update => col.get(x_row) + delta,
                    };
                    updated.set(x_row, v);
                }
            }
            *work.column_mut(c) = updated;
        }
        for (x_row, c) in kills {
            work.column_mut(c).set(x_row, 0.0);
            let col = work.column_mut(c);
            if x_row >= col.start && x_row < col.end() {
                col.values[x_row - col.start] = 0.0;
            }
            col.trim();
        }
        steps.push(step);
    }

    // what is left must be diagonal on the even rows
    let size = eo.columns().iter().fold(0.0f64, |a, c| {
        c.values.iter().fold(a, |b, v| b.max(v.abs()))
    });
    let mut scale = vec![0.0; n];
    for c in 0..n {
        let col = work.column(c);
        for r in col.start..col.end() {
            let v = col.get(r);
            if r == 2 * c {
                scale[c] = v;
            } else if v.abs() > FACTOR_TOLERANCE * size.max(1.0) {
                return Err(Error::Factoring {
                    step: kinds.len(),
                    column: c,
                });
            }
        }
        if !(scale[c].abs() > SCALE_MIN) {
            return Err(Error::Conditioning {
                context: "lifting scale",
                index: Some(c),
                rcond: scale[c].abs(),
            });
        }
    }
    let scheme = LiftingScheme {
        kind,
        pairs,
        evens: n,
        steps,
        scale,
    };
    let err = scheme.reconstruct().max_abs_diff(eo);
    if !(err <= FACTOR_TOLERANCE * size.max(1.0)) {
        return Err(Error::Inconsistent {
            context: "lifting reconstruction",
            index: 0,
            residual: err,
        });
    }
    Ok(scheme)
}

/// Column `m` of the final update: `[U_{m,m}, U_{m+1,m}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinalUpdate {
    pub coeffs: Vec<[f64; 2]>,
}

impl FinalUpdate {
    /// Dense `n x (n - 1)` view.
    pub fn to_matrix(&self) -> Matrix {
        let w = self.coeffs.len();
        let mut out = Matrix::zeros(w + 1, w);
        for (m, [a, b]) in self.coeffs.iter().enumerate() {
            out[(m, m)] = *a;
            out[(m + 1, m)] = *b;
        }
        out
    }

    /// `s += U d`. Returns multiply-adds.
    pub fn add_to(&self, s: &mut [f64], d: &[f64]) -> usize {
        for (m, [a, b]) in self.coeffs.iter().enumerate() {
            s[m] += a * d[m];
            s[m + 1] += b * d[m];
        }
        2 * self.coeffs.len()
    }

    /// `s -= U d`.
    pub fn subtract_from(&self, s: &mut [f64], d: &[f64]) -> usize {
        for (m, [a, b]) in self.coeffs.iter().enumerate() {
            s[m] -= a * d[m];
            s[m + 1] -= b * d[m];
        }
        2 * self.coeffs.len()
    }
}

/// Primitive and final detail matrices of one level (interior rows only;
/// the boundary rows of the details are zero).
#[derive(Debug, Clone, PartialEq)]
pub struct DetailMatrices {
    pub primitive: BandColumns,
    pub final_update: FinalUpdate,
    pub detail: BandColumns,
    /// Largest `|int psi_m x^q|` over all wavelets and `q < 2`.
    pub moment_residual: f64,
}

/// Chooses the final update so every wavelet integrates `1` and `x` to zero.
///
/// `coarse_moments[q][k]` and `fine_moments[q][l]` are the moments of the
/// interior coarse and fine functions (`q = 0, 1`).
pub fn design_final_update(
    eo: &BandColumns,
    primitive: &BandColumns,
    coarse_moments: &[Vec<f64>],
    fine_moments: &[Vec<f64>],
) -> Result<DetailMatrices> {
    let n = eo.cols();
    let w = primitive.cols();
    if coarse_moments.len() < 2 || fine_moments.len() < 2 {
        return Err(Error::Shape {
            expected: 2,
            found: coarse_moments.len().min(fine_moments.len()),
        });
    }
    for q in 0..2 {
        if coarse_moments[q].len() != n {
            return Err(Error::Shape {
                expected: n,
                found: coarse_moments[q].len(),
            });
        }
        if fine_moments[q].len() != eo.rows() {
            return Err(Error::Shape {
                expected: eo.rows(),
                found: fine_moments[q].len(),
            });
        }
    }
    let primal: Vec<Vec<f64>> = (0..2)
        .map(|q| primitive.transpose_mul_vec(&fine_moments[q]))
        .collect();
    let mut coeffs = Vec::with_capacity(w);
    for m in 0..w {
        let a = Matrix::from_rows(&[
            &[coarse_moments[0][m], coarse_moments[0][m + 1]],
            &[coarse_moments[1][m], coarse_moments[1][m + 1]],
        ]);
        let lu = Lu::new(&a);
        if lu.is_singular() || !(lu.rcond() > 1e-12) {
            return Err(Error::Design { wavelet: m });
        }
        let u = lu.solve(&[primal[0][m], primal[1][m]]);
        coeffs.push([u[0], u[1]]);
    }
    let final_update = FinalUpdate { coeffs };

    // G = G0 - H_eo U
    let mut detail = primitive.clone();
    for (m, [a, b]) in final_update.coeffs.iter().enumerate() {
        let col = detail.column_mut(m);
        for (k, f) in [(m, *a), (m + 1, *b)] {
            let hc = eo.column(k);
            for r in hc.start..hc.end() {
                let v = col.get(r) - f * hc.get(r);
                col.set(r, v);
            }
        }
        col.trim();
    }
    let mut moment_residual = 0.0f64;
    for q in 0..2 {
        for v in detail.transpose_mul_vec(&fine_moments[q]) {
            moment_residual = moment_residual.max(v.abs());
        }
    }
    if !(moment_residual < MOMENT_TOLERANCE) {
        return Err(Error::Inconsistent {
            context: "vanishing moments",
            index: 0,
            residual: moment_residual,
        });
    }
    Ok(DetailMatrices {
        primitive: primitive.clone(),
        final_update,
        detail,
        moment_residual,
    })
}

/// Wavelets `psi_m = sum_l G_{l,m} phi_{fine,l}` with `G` in full fine
/// indexing (boundary rows zero).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFunctions {
    coefficients: BandColumns,
}

impl WaveletFunctions {
    /// Embeds the interior details into the full fine index range.
    pub fn new(details: &DetailMatrices, left: usize, fine_count: usize) -> Self {
        let cols = details
            .detail
            .columns()
            .iter()
            .map(|c| {
                let mut c = c.clone();
                if !c.values.is_empty() {
                    c.start += left;
                }
                c
            })
            .collect();
        Self {
            coefficients: BandColumns::from_columns(fine_count, cols),
        }
    }

    pub fn len(&self) -> usize {
        self.coefficients.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.cols() == 0
    }

    pub fn coefficients(&self) -> &BandColumns {
        &self.coefficients
    }

    /// Knot range `[lo, hi]` of the fine grid outside which `psi_m`
    /// vanishes.
    pub fn support(&self, fine: &BrokenBasis, m: usize) -> (usize, usize) {
        let c = self.coefficients.column(m);
        match c.range() {
            None => (0, 0),
            Some((a, b)) => (fine.support(a).0, fine.support(b).1),
        }
    }

    /// All wavelets (derivative `deriv`) at `x`.
    pub fn evaluate(&self, fine: &BrokenBasis, x: f64, deriv: usize) -> Result<Vec<f64>> {
        let phi = fine.evaluate(x, deriv)?;
        Ok(self.coefficients.transpose_mul_vec(&phi))
    }
}
