//! Multilevel forward and inverse wavelet transforms.
//!
//! A plan holds, for every pair of consecutive levels, the refinement split
//! into boundary and interior parts, the lifting factors of the interior
//! and the designed final update. Nothing is ever stored as a dense
//! analysis matrix: one analysis step inverts the small boundary blocks,
//! peels the boundary contribution off the interior fine coefficients and
//! runs the lifting steps. Synthesis retraces the same path backwards.

use alloc::vec;
use alloc::vec::Vec;

use crate::basis::BrokenBasis;
use crate::error::{Error, Result};
use crate::knots::{min_knots, KnotHierarchy};
use crate::lifting::{
    design_final_update, factor, split_interior, DetailMatrices, InteriorSplit, LiftingScheme,
    WaveletFunctions,
};
use crate::linalg::{Lu, Matrix};
use crate::refinement::{refinement_matrix, RefinementMatrix};
use crate::smooth::SmoothFamily;

/// Coarse scaling coefficients plus one detail vector per level, coarse
/// level first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPyramid {
    pub coarse: Vec<f64>,
    pub details: Vec<Vec<f64>>,
}

impl CoefficientPyramid {
    pub fn level_count(&self) -> usize {
        self.details.len()
    }

    /// Total number of coefficients.
    pub fn len(&self) -> usize {
        self.coarse.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest detail magnitude over all levels.
    pub fn max_detail(&self) -> f64 {
        self.details
            .iter()
            .flatten()
            .fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// Everything needed to move between level `j + 1` and level `j`.
#[derive(Debug, Clone)]
pub struct LevelPlan {
    pub refinement: RefinementMatrix,
    pub split: InteriorSplit,
    pub scheme: LiftingScheme,
    pub details: DetailMatrices,
    bb_left_inv: Matrix,
    bb_right_inv: Matrix,
}

impl LevelPlan {
    /// Coarse coefficient count.
    pub fn coarse_len(&self) -> usize {
        self.refinement.cols()
    }

    /// Fine coefficient count.
    pub fn fine_len(&self) -> usize {
        self.refinement.rows()
    }

    /// Detail coefficient count, `n_{j+1} - n_j`.
    pub fn detail_len(&self) -> usize {
        self.scheme.odds()
    }

    /// Interior fine coefficients minus the boundary contribution.
    fn interior_residual(&self, fine: &[f64], sb: &[f64], ops: &mut usize) -> Vec<f64> {
        let bl = self.split.left;
        let nf = self.split.eo.rows();
        let mut t = fine[bl..bl + nf].to_vec();
        for (c, col) in self.split.eo_b.columns().iter().enumerate() {
            for (i, v) in col.values.iter().enumerate() {
                t[col.start + i] -= v * sb[c];
            }
            *ops += col.values.len();
        }
        t
    }

    /// One analysis step. Returns `(s_j, d_j, multiply-adds)`.
    pub fn forward_counted(&self, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize)> {
        if fine.len() != self.fine_len() {
            return Err(Error::Shape {
                expected: self.fine_len(),
                found: fine.len(),
            });
        }
        let (bl, br) = (self.split.left, self.split.right);
        let n = self.split.coarse_knots;
        let nf = 2 * n - 1;
        let mut ops = 0;

        let mut sb = self.bb_left_inv.mul_vec(&fine[..bl]);
        sb.extend(self.bb_right_inv.mul_vec(&fine[bl + nf..]));
        ops += bl * bl + br * br;

        let t = self.interior_residual(fine, &sb, &mut ops);
        let mut e: Vec<f64> = t.iter().step_by(2).copied().collect();
        let mut o: Vec<f64> = t.iter().skip(1).step_by(2).copied().collect();
        ops += self.scheme.reduce(&mut e, &mut o);
        for (v, d) in e.iter_mut().zip(self.scheme.scale()) {
            *v /= d;
        }
        ops += n;
        ops += self.details.final_update.add_to(&mut e, &o);

        let mut coarse = Vec::with_capacity(self.coarse_len());
        coarse.extend_from_slice(&sb[..bl]);
        coarse.extend_from_slice(&e);
        coarse.extend_from_slice(&sb[bl..]);
        Ok((coarse, o, ops))
    }

    /// One synthesis step. Returns `(s_{j+1}, multiply-adds)`.
    pub fn inverse_counted(&self, coarse: &[f64], detail: &[f64]) -> Result<(Vec<f64>, usize)> {
        if coarse.len() != self.coarse_len() {
            return Err(Error::Shape {
                expected: self.coarse_len(),
                found: coarse.len(),
            });
        }
        if detail.len() != self.detail_len() {
            return Err(Error::Shape {
                expected: self.detail_len(),
                found: detail.len(),
            });
        }
        let (bl, br) = (self.split.left, self.split.right);
        let n = self.split.coarse_knots;
        let nf = 2 * n - 1;
        let mut ops = 0;

        let mut sb = coarse[..bl].to_vec();
        sb.extend_from_slice(&coarse[bl + n..]);
        let mut e = coarse[bl..bl + n].to_vec();
        let mut o = detail.to_vec();
        ops += self.details.final_update.subtract_from(&mut e, &o);
        for (v, d) in e.iter_mut().zip(self.scheme.scale()) {
            *v *= d;
        }
        ops += n;
        ops += self.scheme.restore(&mut e, &mut o);

        let mut fine = vec![0.0; self.fine_len()];
        let left = self.split.bb_left.mul_vec(&sb[..bl]);
        let right = self.split.bb_right.mul_vec(&sb[bl..]);
        ops += bl * bl + br * br;
        fine[..bl].copy_from_slice(&left);
        fine[bl + nf..].copy_from_slice(&right);
        for (i, v) in e.iter().enumerate() {
            fine[bl + 2 * i] = *v;
        }
        for (i, v) in o.iter().enumerate() {
            fine[bl + 2 * i + 1] = *v;
        }
        for (c, col) in self.split.eo_b.columns().iter().enumerate() {
            for (i, v) in col.values.iter().enumerate() {
                fine[bl + col.start + i] += v * sb[c];
            }
            ops += col.values.len();
        }
        Ok((fine, ops))
    }

    /// Dense `[H | G]` of this level (fine rows, coarse then detail
    /// columns), built column by column through synthesis.
    pub fn synthesis_matrix(&self) -> Result<Matrix> {
        let nc = self.coarse_len();
        let nd = self.detail_len();
        let mut out = Matrix::zeros(self.fine_len(), nc + nd);
        for c in 0..nc + nd {
            let mut s = vec![0.0; nc];
            let mut d = vec![0.0; nd];
            if c < nc {
                s[c] = 1.0;
            } else {
                d[c - nc] = 1.0;
            }
            let (col, _) = self.inverse_counted(&s, &d)?;
            for (r, v) in col.iter().enumerate() {
                out[(r, c)] = *v;
            }
        }
        Ok(out)
    }
}

fn small_inverse(m: &Matrix, context: &'static str) -> Result<Matrix> {
    if m.rows() == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let lu = Lu::new(m);
    if lu.is_singular() {
        return Err(Error::Conditioning {
            context,
            index: None,
            rcond: 0.0,
        });
    }
    Ok(lu.inverse())
}

/// Transform plan over a whole knot hierarchy.
#[derive(Debug, Clone)]
pub struct TransformPlan {
    bases: Vec<BrokenBasis>,
    levels: Vec<LevelPlan>,
}

impl TransformPlan {
    /// Builds every basis, refinement, factorization and final update.
    pub fn new(family: &SmoothFamily, hierarchy: &KnotHierarchy) -> Result<Self> {
        if !family.starts_with_affine() {
            return Err(Error::InvalidFamily(
                "the first two members must be 1 and x".into(),
            ));
        }
        let n0 = hierarchy.level(0).len();
        let required = min_knots(family.order());
        if n0 < required {
            return Err(Error::GridTooSmall {
                knots: n0,
                required,
            });
        }
        let bases = hierarchy
            .levels()
            .iter()
            .map(|g| BrokenBasis::build(family, g))
            .collect::<Result<Vec<_>>>()?;
        let mut levels = Vec::with_capacity(bases.len().saturating_sub(1));
        for pair in bases.windows(2) {
            levels.push(Self::build_level(&pair[0], &pair[1])?);
        }
        Ok(Self { bases, levels })
    }

    fn build_level(coarse: &BrokenBasis, fine: &BrokenBasis) -> Result<LevelPlan> {
        let m = coarse.order();
        let refinement = refinement_matrix(coarse, fine)?;
        let split = split_interior(&refinement)?;
        let scheme = factor(&split.eo, m)?;
        let primitive = scheme.primitive_details();

        let table = fine.moments(1);
        let bl = split.left;
        let n = split.coarse_knots;
        let nf = 2 * n - 1;
        let mut fine_moments = Vec::with_capacity(2);
        let mut coarse_moments = Vec::with_capacity(2);
        for q in 0..2 {
            let full = table.totals(q);
            let coarse_full = refinement.matrix().transpose_mul_vec(&full);
            fine_moments.push(full[bl..bl + nf].to_vec());
            coarse_moments.push(coarse_full[bl..bl + n].to_vec());
        }
        let details = design_final_update(&split.eo, &primitive, &coarse_moments, &fine_moments)?;
        let bb_left_inv = small_inverse(&split.bb_left, "left boundary block")?;
        let bb_right_inv = small_inverse(&split.bb_right, "right boundary block")?;
        Ok(LevelPlan {
            refinement,
            split,
            scheme,
            details,
            bb_left_inv,
            bb_right_inv,
        })
    }

    /// Number of refinement steps `L`.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn basis(&self, j: usize) -> &BrokenBasis {
        &self.bases[j]
    }

    pub fn finest(&self) -> &BrokenBasis {
        self.bases.last().expect("plan has at least one level")
    }

    pub fn level(&self, j: usize) -> &LevelPlan {
        &self.levels[j]
    }

    /// Wavelets between level `j` and `j + 1`.
    pub fn wavelets(&self, j: usize) -> WaveletFunctions {
        let lp = &self.levels[j];
        WaveletFunctions::new(&lp.details, lp.split.left, lp.fine_len())
    }

    fn check_level(&self, j: usize) -> Result<&LevelPlan> {
        self.levels.get(j).ok_or(Error::Shape {
            expected: self.levels.len(),
            found: j,
        })
    }

    pub fn forward_step(&self, j: usize, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (s, d, _) = self.check_level(j)?.forward_counted(fine)?;
        Ok((s, d))
    }

    pub fn inverse_step(&self, j: usize, coarse: &[f64], detail: &[f64]) -> Result<Vec<f64>> {
        Ok(self.check_level(j)?.inverse_counted(coarse, detail)?.0)
    }

    /// Full analysis of finest-level coefficients.
    pub fn forward(&self, fine: &[f64]) -> Result<CoefficientPyramid> {
        let expected = self.finest().len();
        if fine.len() != expected {
            return Err(Error::Shape {
                expected,
                found: fine.len(),
            });
        }
        let mut s = fine.to_vec();
        let mut details = vec![Vec::new(); self.levels.len()];
        for j in (0..self.levels.len()).rev() {
            let (c, d) = self.forward_step(j, &s)?;
            details[j] = d;
            s = c;
        }
        Ok(CoefficientPyramid { coarse: s, details })
    }

    /// Full synthesis back to the finest level.
    pub fn inverse(&self, pyramid: &CoefficientPyramid) -> Result<Vec<f64>> {
        if pyramid.details.len() != self.levels.len() {
            return Err(Error::Shape {
                expected: self.levels.len(),
                found: pyramid.details.len(),
            });
        }
        let mut s = pyramid.coarse.clone();
        for (j, d) in pyramid.details.iter().enumerate() {
            s = self.inverse_step(j, &s, d)?;
        }
        Ok(s)
    }

    /// Projects `f` onto the finest basis and analyzes the result.
    pub fn analyze_function(&self, f: &dyn Fn(f64) -> Result<f64>) -> Result<CoefficientPyramid> {
        let fine = self.finest().project_coefficients(f)?;
        self.forward(&fine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::KnotGrid;

    fn hat_plan() -> TransformPlan {
        let f = SmoothFamily::powers(2).unwrap();
        let h = KnotHierarchy::midpoint(KnotGrid::uniform(5).unwrap(), 1).unwrap();
        TransformPlan::new(&f, &h).unwrap()
    }

    #[test]
    fn ones_have_no_details() {
        let p = hat_plan();
        let (s, d) = p.forward_step(0, &[1.0; 9]).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-13));
        assert!(d.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn odd_impulse() {
        let p = hat_plan();
        let mut x = vec![0.0; 9];
        x[3] = 1.0;
        let (s, d) = p.forward_step(0, &x).unwrap();
        assert!((d[1] - 1.0).abs() < 1e-13);
        assert!(d.iter().enumerate().all(|(i, v)| i == 1 || v.abs() < 1e-13));
        // predicted from the even neighbours, then updated by a quarter
        assert!((s[1] - 0.25).abs() < 1e-13 && (s[2] - 0.25).abs() < 1e-13);
    }

    #[test]
    fn pure_refinement_and_wavelet_columns() {
        let p = hat_plan();
        let lp = p.level(0);
        let s = [0.3, -1.0, 2.0, 0.5, 1.5];
        let fine = p.inverse_step(0, &s, &[0.0; 4]).unwrap();
        let want = lp.refinement.matrix().mul_vec(&s);
        for (a, b) in fine.iter().zip(&want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shape_errors() {
        let p = hat_plan();
        assert!(matches!(p.forward(&[0.0; 4]), Err(Error::Shape { expected: 9, .. })));
    }
}
